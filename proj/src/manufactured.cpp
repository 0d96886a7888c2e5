#include "morawetz/manufactured.hpp"

#include <cmath>

namespace morawetz {

Jet ManufacturedField::operator()(double t, double r, double theta) const {
  const Jet1 T = time(t), R = radial(r), A = angular(theta);
  Jet j;
  j.f = T.f * R.f * A.f;
  j.t = T.d1 * R.f * A.f;
  j.r = T.f * R.d1 * A.f;
  j.th = T.f * R.f * A.d1;
  j.tt = T.d2 * R.f * A.f;
  j.rr = T.f * R.d2 * A.f;
  j.thth = T.f * R.f * A.d2;
  return j;
}

namespace {

Profile one() {
  return [](double) { return Jet1{1.0, 0.0, 0.0}; };
}

Profile decay(double tau) {
  return [tau](double t) {
    const double e = std::exp(-t / tau);
    return Jet1{e, -e / tau, e / (tau * tau)};
  };
}

Profile legendre2() {
  return [](double th) {
    const double c = std::cos(th), s = std::sin(th);
    return Jet1{0.5 * (3.0 * c * c - 1.0), -3.0 * c * s, -3.0 * std::cos(2.0 * th)};
  };
}

// g(r) * h(r) with g = sin or cos of k r and h = 1/(1+(r/L)^2)
Profile oscillatory(double k, double L, bool use_sin) {
  return [=](double r) {
    const double g = use_sin ? std::sin(k * r) : std::cos(k * r);
    const double g1 = use_sin ? k * std::cos(k * r) : -k * std::sin(k * r);
    const double g2 = -k * k * g;
    const double q = 1.0 + (r / L) * (r / L);
    const double h = 1.0 / q;
    const double h1 = -2.0 * r / (L * L) / (q * q);
    const double h2 = -2.0 / (L * L) / (q * q) + 8.0 * r * r / (L * L * L * L) / (q * q * q);
    return Jet1{g * h, g1 * h + g * h1, g2 * h + 2.0 * g1 * h1 + g * h2};
  };
}

}  // namespace

ManufacturedField constant_field() { return {"constant", one(), one(), one()}; }

ManufacturedField decaying_over_r_P2(double M) {
  Profile radial = [M](double r) { return Jet1{M / r, -M / (r * r), 2.0 * M / (r * r * r)}; };
  return {"decay_over_r_P2", decay(10.0 * M), radial, legendre2()};
}

ManufacturedField oscillatory_P0(double M) {
  return {"oscillatory_P0", decay(20.0 * M), oscillatory(1.0 / M, 4.0 * M, true), one()};
}

ManufacturedField oscillatory_P2(double M) {
  return {"oscillatory_P2", decay(5.0 * M), oscillatory(0.7 / M, 3.0 * M, false), legendre2()};
}

std::vector<ManufacturedField> manufactured_catalog(double M) {
  return {decaying_over_r_P2(M), oscillatory_P0(M), oscillatory_P2(M)};
}

}  // namespace morawetz
