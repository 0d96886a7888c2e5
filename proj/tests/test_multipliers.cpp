#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "morawetz/multipliers.hpp"

using namespace morawetz;
using doctest::Approx;

namespace {

const Params unit{1.0};

const MultiplierSet& defaults() {
  static const MultiplierSet ms = MultiplierSet::build(unit);
  return ms;
}

const MultiplierSet& hardy() {
  static const MultiplierSet ms = [] {
    MultiplierOptions o;
    o.profile = JProfile::hardy_taper;
    return MultiplierSet::build(unit, o);
  }();
  return ms;
}

// u from its defining integral, w taken piecewise with the branch at r_*.
double u_quadrature(const Params& p, double r) {
  using Q = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double M = p.M, rt = r_trap(p), rs = r_star_pt(p);
  auto up = [&](double s) {
    const double w = s <= rs ? 1.0 / (4 * M) : eval_w(p, s);
    return sigma(p, s) * sigma(p, s) * w / delta(p, s);
  };
  auto piece = [&](double a, double b) { return Q::integrate(up, a, b, 12, 1e-13); };
  if (r <= rs || rt >= rs) return piece(rt, r);
  return piece(rt, rs) + piece(rs, r);
}

}  // namespace

TEST_CASE("z and w values") {
  CHECK(eval_z(unit, 1.0) == 0.0);
  CHECK(eval_z(unit, 2.0) == Approx(0.04).epsilon(1e-15));
  CHECK(eval_z(unit, 1e5) * 1e10 == Approx(1.0).epsilon(1e-4));
  const auto& ms = defaults();
  CHECK(sample(ms, 2.0).w == 0.25);
  CHECK(sample(ms, 5.0).w == Approx(160.0 / 676.0).epsilon(1e-14));
  CHECK(eval_w(unit, ms.r_star()) == Approx(0.25).epsilon(1e-14));
}

TEST_CASE("w is C1 at r_*") {
  const double rs = r_star_pt(unit);
  CHECK(std::abs(eval_w_prime(unit, rs)) < 1e-14);
  for (double h : {1e-4, 1e-5}) {
    const double right = (sample(defaults(), rs + h).w - 0.25) / h;
    CHECK(std::abs(right) < 10 * h);
  }
}

TEST_CASE("u constants and values") {
  const auto& ms = defaults();
  CHECK(ms.C1() == Approx(-5.6335031178484369).epsilon(1e-12));
  CHECK(ms.C2() == Approx(-5.4387821812658874).epsilon(1e-12));
  CHECK(std::abs(eval_u(ms, ms.r_trap())) < 1e-12);
  CHECK(eval_u(ms, ms.r_star()) == Approx(8.4894210490096214).epsilon(1e-12));
  CHECK(eval_u(ms, 1.5) == Approx(-6.3010474789683277).epsilon(1e-12));
  CHECK(eval_u(ms, 10.0) == Approx(94.561217818734107).epsilon(1e-12));
  CHECK_THROWS_AS(eval_u(ms, 1.0), std::domain_error);
}

TEST_CASE("u against quadrature of its defining integral") {
  const auto& ms = defaults();
  for (double r : log_grid(1.0, 1.001, 20.0, 25)) {
    const double q = u_quadrature(unit, r);
    CHECK(eval_u(ms, r) == Approx(q).epsilon(1e-9));
  }
}

TEST_CASE("u' relation on both branches") {
  const auto& ms = defaults();
  for (double r : {1.01, 1.5, 3.0, 3.7, 3.8, 10.0, 300.0}) {
    const double h = 1e-3 * (r - 1);
    const double fd = (-eval_u(ms, r + 2 * h) + 8 * eval_u(ms, r + h) - 8 * eval_u(ms, r - h) + eval_u(ms, r - 2 * h)) /
                      (12 * h);
    const double up = sigma(unit, r) * sigma(unit, r) * sample(ms, r).w / delta(unit, r);
    const double analytic = r <= ms.r_star() ? eval_u_prime(unit, r) : 2 * r;
    CHECK(analytic == Approx(up).epsilon(1e-10));
    if (std::abs(r - ms.r_star()) > 0.1) CHECK(fd == Approx(up).epsilon(1e-8));
  }
}

TEST_CASE("u sign and monotonicity") {
  const auto& ms = defaults();
  double prev = -1e300;
  for (double r : log_grid(1.0, 1.0 + 1e-6, 1e4, 20000)) {
    const double u = eval_u(ms, r);
    CHECK(u > prev);
    prev = u;
    if (std::abs(r - ms.r_trap()) > 1e-9) CHECK((u > 0) == (r > ms.r_trap()));
  }
}

TEST_CASE("A: near horizon, Lemma form, bound") {
  const auto& ms = defaults();
  for (double h : {1e-3, 1e-4, 1e-5}) CHECK(eval_A(ms, 1.0 + h) / (h * h) == Approx(0.25).epsilon(5 * h));
  for (double r : {1.5, 3.0, 10.0}) {
    // z^{1/2} Delta^{3/2} d/dr (z^{1/2} u / Delta^{1/2}) with the derivative taken by differences
    auto g = [&](double x) { return std::sqrt(eval_z(unit, x)) * eval_u(ms, x) / std::sqrt(delta(unit, x)); };
    const double h = 1e-3;
    const double dg = (-g(r + 2 * h) + 8 * g(r + h) - 8 * g(r - h) + g(r - 2 * h)) / (12 * h);
    const double lemma = std::sqrt(eval_z(unit, r)) * std::pow(delta(unit, r), 1.5) * dg;
    CHECK(eval_A(ms, r) == Approx(lemma).epsilon(1e-10));
  }
  const double rs = ms.r_star();
  const double bound = 2 * ms.c0() * rs * std::pow(rs - 1, 4) / std::pow(sigma(unit, rs), 3);
  CHECK(eval_A(ms, rs) >= bound);
  CHECK(ms.c0() == Approx(2 * (2 + std::sqrt(3.0)) * (1 + std::sqrt(2.0) - std::sqrt(3.0))).epsilon(1e-15));
}

TEST_CASE("A scales linearly in M at fixed r/M") {
  const MultiplierSet m1 = MultiplierSet::build(Params{1.0});
  MultiplierOptions o;
  o.r_e = 2.2;
  const MultiplierSet m2 = MultiplierSet::build(Params{2.0}, o);
  for (double x : {1.01, 1.5, 2.5, 4.0, 50.0}) CHECK(eval_A(m2, 2 * x) == Approx(2 * eval_A(m1, x)).epsilon(1e-12));
}

TEST_CASE("A~ is non-increasing then constant") {
  const auto& ms = defaults();
  double prev = 1e300;
  for (double r : log_grid(1.0, 1.001, ms.r_star(), 2000)) {
    const double a = eval_A_tilde(ms, r);
    CHECK(a <= prev + 1e-12);
    prev = a;
  }
  for (double r : {4.0, 10.0, 1e3}) CHECK(eval_A_tilde(ms, r) == Approx(ms.A_tilde_star()).epsilon(1e-14));
}

TEST_CASE("V values") {
  CHECK(eval_V(unit, 4.0) == Approx(4347.0 / 83521.0).epsilon(1e-14));
  const auto& ms = defaults();
  CHECK(sample(ms, 2.0).V == 0.0);
  CHECK(sample(ms, ms.r_star()).V == 0.0);
  CHECK(sample(ms, std::nextafter(ms.r_star(), 10.0)).V > 0.0);
  for (double r : log_grid(1.0, 1.0001, 1e4, 5000)) CHECK(sample(ms, r).V >= 0.0);
}

TEST_CASE("w_T and box w_T") {
  CHECK(eval_wT(unit, 1.0) == 0.0);
  CHECK(std::abs(eval_wT(unit, r_trap(unit))) < 1e-18);
  CHECK(eval_wT(unit, 2.0) == Approx(-std::pow(2 - r_trap(unit), 2) / 128).epsilon(1e-14));
  CHECK(eval_wT(unit, 2.0) == Approx(-0.001341).epsilon(1e-3));
  const auto& ms = defaults();
  const auto& x = ms.quartic_roots();
  // -1/4 d/dr (Delta d/dr w_T) by differences of the analytic w_T'
  for (double r : {1.05, 1.5, 2.0, 3.0, 6.0, 12.0}) {
    const double h = 1e-4;
    auto f = [&](double s) { return delta(unit, s) * eval_wT_prime(unit, s); };
    const double fd = -0.25 * (-f(r + 2 * h) + 8 * f(r + h) - 8 * f(r - h) + f(r - 2 * h)) / (12 * h);
    CHECK(eval_boxwT(ms, r) == Approx(fd).epsilon(1e-8));
    CHECK(eval_boxwT(ms, r) == Approx(eval_boxwT_expanded(unit, r)).epsilon(1e-10));
  }
  CHECK(eval_boxwT(ms, 0.5 * (1 + x[0])) > 0);
  CHECK(eval_boxwT(ms, 1.1 * x[3]) > 0);
  CHECK(eval_boxwT(ms, 0.5 * (x[0] + x[1])) < 0);
}

TEST_CASE("quartic roots against the companion matrix") {
  const double s2 = std::sqrt(2.0);
  const double c[5] = {56 * s2 + 84, -7 * (21 + 16 * s2), 93 + 68 * s2, -3 * (9 + 4 * s2), 3};
  Eigen::Matrix4d C = Eigen::Matrix4d::Zero();
  for (int i = 1; i < 4; ++i) C(i, i - 1) = 1;
  for (int i = 0; i < 4; ++i) C(i, 3) = -c[i] / c[4];
  Eigen::EigenSolver<Eigen::Matrix4d> es(C);
  std::vector<double> ev;
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(es.eigenvalues()(i).imag()) < 1e-12);
    ev.push_back(es.eigenvalues()(i).real());
  }
  std::sort(ev.begin(), ev.end());
  const auto x = quartic_roots(unit);
  for (int i = 0; i < 4; ++i) {
    CHECK(x[i] == Approx(ev[i]).epsilon(1e-9));
    CHECK(x[i] > 1.0);
    CHECK(std::abs(quartic(x[i])) < 1e-12 * 100);
  }
  CHECK(x[0] + x[1] + x[2] + x[3] == Approx(9 + 4 * s2).epsilon(1e-12));
  CHECK(x[0] * x[1] * x[2] * x[3] == Approx((84 + 56 * s2) / 3).epsilon(1e-12));
  CHECK(x[0] == Approx(1.1714703926104).epsilon(1e-12));
  CHECK(x[3] == Approx(8.63567135088751).epsilon(1e-12));
}

TEST_CASE("c1") {
  const auto& ms = defaults();
  CHECK(ms.c1() == Approx(0.002876052319).epsilon(1e-9));
  CHECK(c1_of(ms, 1.2) >= c1_of(ms, 1.1));
  CHECK(c1_of(ms, 1.1) >= c1_of(ms, 1.05));
  CHECK(c1_of(ms, 1.01) < c1_of(ms, 1.05));
  double lb = 1e300;
  for (double r : log_grid(1.0, 1.1, ms.r_star(), 10000))
    lb = std::min(lb, 2 * ms.c0() * r * std::pow(r - 1, 4) / std::pow(sigma(unit, r), 3));
  CHECK(ms.c1() >= lb);
  CHECK(ms.c1() > 0);
}

TEST_CASE("v: Hardy profile on [r_e, r_*]") {
  const auto& ms = hardy();
  CHECK(eval_v(ms, 2.0) == Approx(-ms.c1() / 3).epsilon(1e-14));
  CHECK(eval_v(ms, ms.r_e()) == Approx(-2 * ms.c1() / (1.1 * 2.1 * 0.1)).epsilon(1e-14));
  CHECK(eval_v(ms, 2.0 * ms.r_star() + 0.1) == 0.0);
  // C1 at the break radii
  for (double b : {ms.r_e(), ms.r_star()}) {
    const double h = 1e-7;
    CHECK(eval_v(ms, b - h) == Approx(eval_v(ms, b + h)).epsilon(1e-5));
    CHECK(eval_v_prime(ms, b - h) == Approx(eval_v_prime(ms, b + h)).epsilon(1e-4));
  }
  for (double r : {1.001, 1.01, 1.05}) CHECK(std::abs(eval_v(ms, r)) < std::abs(eval_v(ms, 1.1)));
}

TEST_CASE("v: transport profile") {
  const auto& ms = defaults();
  CHECK(ms.profile() == JProfile::transport);
  for (double r : {1.001, 1.5, 3.0, 20.0}) {
    CHECK(eval_v(ms, r) > 0);
    const double h = 1e-5 * r;
    const double fd = (eval_v(ms, r + h) - eval_v(ms, r - h)) / (2 * h);
    CHECK(eval_v_prime(ms, r) == Approx(fd).epsilon(1e-6));
  }
  CHECK(eval_v(ms, 1.0 + 1e-3) / 1e-9 == Approx(0.025 / std::pow(0.35, 3)).epsilon(1e-2));
}

TEST_CASE("y0 solves the Hardy ODE") {
  for (double r : {1.5, 2.0, 3.0}) {
    const double y = eval_y0(unit, r), yp = eval_y0_prime(unit, r);
    const double res = yp + 2 / r * y - sigma(unit, r) / 4 * y * y;
    CHECK(std::abs(res) <= 1e-12 * std::abs(yp));
  }
}

TEST_CASE("delta_T") {
  const auto& ms = defaults();
  CHECK(ms.delta_T() == 2.0);
  CHECK(delta_T_margin(ms, ms.delta_T()).min_margin >= 0);
  CHECK(delta_T_margin(ms, ms.delta_T() / 2).min_margin < 0);
  // the feasible set is an interval
  std::vector<bool> feasible;
  for (double d = 1e-3; d < 1e3; d *= 1.1) feasible.push_back(delta_T_margin(ms, d).min_margin >= 0);
  const auto first = std::find(feasible.begin(), feasible.end(), true);
  REQUIRE(first != feasible.end());
  const auto last = std::find(first, feasible.end(), false);
  CHECK(std::find(last, feasible.end(), true) == feasible.end());
}

TEST_CASE("r_e above x1 makes delta_T infeasible") {
  MultiplierOptions o;
  o.r_e = 1.5;
  CHECK_THROWS_AS(MultiplierSet::build(unit, o), DeltaTError);
  o.r_e = 0.9;
  CHECK_THROWS_AS(MultiplierSet::build(unit, o), std::domain_error);
}

TEST_CASE("flipped C1 breaks the normalization") {
  MultiplierOptions o;
  o.sabotage.flip_C1 = true;
  const auto ms = MultiplierSet::build(unit, o);
  CHECK(std::abs(eval_u(ms, ms.r_trap())) > 1.0);
}

TEST_CASE("theorem weights") {
  const double rt = r_trap(unit);
  const auto t = theorem_coeffs(unit, rt);
  CHECK(std::abs(t.dt) < 1e-30);
  CHECK(std::abs(t.ang) < 1e-30);
  for (double h : {1e-3, 1e-4}) {
    const auto n = theorem_coeffs(unit, 1 + h);
    CHECK(n.dr / (h * h) == Approx(1.0).epsilon(1e-2));
    CHECK(n.psi / (h * h) == Approx(1.0).epsilon(1e-2));
  }
  const double r = 1e6;
  const auto f = theorem_coeffs(unit, r);
  CHECK(f.dr * r * r * r == Approx(1.0).epsilon(1e-5));
  CHECK(f.dt * r * r * r == Approx(1.0).epsilon(1e-5));
  CHECK(f.ang * r == Approx(1.0).epsilon(1e-5));
  CHECK(f.psi * r * r * r * r == Approx(1.0).epsilon(1e-5));
}

TEST_CASE("profile strings") {
  CHECK(j_profile_from_string(to_string(JProfile::hardy_taper)) == JProfile::hardy_taper);
  CHECK(j_profile_from_string("transport") == JProfile::transport);
  CHECK_THROWS(j_profile_from_string("nope"));
}
