#pragma once

// Method-of-lines evolution of axisymmetric waves on extremal Kerr in
// (t, r*, theta). Radial index i runs along r*, angular index j along the
// half-staggered theta_j = (j + 1/2) dtheta.

#include <Eigen/Core>
#include <cmath>
#include <numbers>
#include <string>

#include "morawetz/errors.hpp"
#include "morawetz/geometry.hpp"

namespace morawetz {

enum class Boundary { sommerfeld, dirichlet };

std::string to_string(Boundary b);
Boundary boundary_from_string(const std::string& s);

struct GridConfig {
  double rstar_min = -50.0;
  double rstar_max = 300.0;
  int nr = 2048;
  int ntheta = 48;
  Boundary boundary = Boundary::sommerfeld;
};

struct GaussianData {
  double A = 1.0;
  double r0star = 10.0;
  double sigma = 3.0;
  int ell = 2;
};

template <typename Scalar = double>
struct Grid {
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
  using Array2 = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Params params;
  Boundary boundary = Boundary::sommerfeld;
  Eigen::Index nr = 0, ntheta = 0;
  Scalar rstar_min = 0, rstar_max = 0, drs = 0, dtheta = 0;
  Array rs, r, delta, sigma;
  Array sigma_half;  // r^2+M^2 at rs_i + drs/2, size nr-1
  Array theta, sin_theta, cos_theta;
  Array sin_face;  // sin(j dtheta), size ntheta+1, exact zeros at the poles
  Array2 W;        // (r^2+M^2)^2/Delta - M^2 sin^2 theta
};

template <typename Scalar = double>
struct FieldState {
  using Array2 = typename Grid<Scalar>::Array2;
  Scalar t = 0;
  Array2 psi;
  Array2 pi;
};

template <typename Scalar>
Grid<Scalar> make_grid(const Params& p, const GridConfig& c) {
  validate(p);
  if (!(c.rstar_min < c.rstar_max)) throw ConfigError("grid.rstar_min must be below grid.rstar_max");
  if (c.nr < 16) throw ConfigError("grid.nr must be at least 16");
  if (c.ntheta < 8) throw ConfigError("grid.ntheta must be at least 8");
  Grid<Scalar> g;
  g.params = p;
  g.boundary = c.boundary;
  g.nr = c.nr;
  g.ntheta = c.ntheta;
  g.rstar_min = Scalar(c.rstar_min);
  g.rstar_max = Scalar(c.rstar_max);
  g.drs = (g.rstar_max - g.rstar_min) / Scalar(c.nr - 1);
  g.dtheta = Scalar(std::numbers::pi) / Scalar(c.ntheta);

  g.rs.resize(g.nr);
  g.r.resize(g.nr);
  for (Eigen::Index i = 0; i < g.nr; ++i) {
    g.rs(i) = g.rstar_min + Scalar(i) * g.drs;
    g.r(i) = invert_tortoise(p, g.rs(i));
  }
  g.delta = delta(p, g.r);
  g.sigma = sigma(p, g.r);
  g.sigma_half.resize(g.nr - 1);
  for (Eigen::Index i = 0; i + 1 < g.nr; ++i) {
    const Scalar rh = invert_tortoise(p, g.rs(i) + g.drs / Scalar(2));
    g.sigma_half(i) = sigma(p, rh);
  }

  g.theta.resize(g.ntheta);
  for (Eigen::Index j = 0; j < g.ntheta; ++j) g.theta(j) = (Scalar(j) + Scalar(0.5)) * g.dtheta;
  g.sin_theta = sin(g.theta);
  g.cos_theta = cos(g.theta);
  g.sin_face.resize(g.ntheta + 1);
  for (Eigen::Index j = 0; j <= g.ntheta; ++j) g.sin_face(j) = std::sin(Scalar(j) * g.dtheta);
  g.sin_face(0) = 0;
  g.sin_face(g.ntheta) = 0;

  const Scalar M2 = Scalar(p.M * p.M);
  g.W = ((g.sigma * g.sigma / g.delta).matrix() * Eigen::Matrix<Scalar, 1, Eigen::Dynamic>::Ones(g.ntheta)).array() -
        M2 * (Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Ones(g.nr) * g.sin_theta.square().matrix().transpose()).array();
  if (!(g.W > Scalar(0)).all()) throw ConfigError("time weight W is not positive on the grid");
  return g;
}

template <typename Scalar>
Scalar cfl_dt(const Grid<Scalar>& g, double cfl) {
  using std::min;
  return Scalar(cfl) * min(g.drs, g.r(0) * g.dtheta);
}

// dpsi = pi, dpi = S(psi)/W with the configured radial boundary closure.
template <typename Scalar>
void rhs_into(const Grid<Scalar>& g, const typename Grid<Scalar>::Array2& psi, const typename Grid<Scalar>::Array2& pi,
              typename Grid<Scalar>::Array2& dpsi, typename Grid<Scalar>::Array2& dpi) {
  const Eigen::Index nr = g.nr, nt = g.ntheta;
  dpsi = pi;
  dpi.resize(nr, nt);
  const Scalar ih2 = Scalar(1) / (g.drs * g.drs);
  const Scalar ith2 = Scalar(1) / (g.dtheta * g.dtheta);
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < nt; ++j) {
    const Eigen::Index jm = j == 0 ? 0 : j - 1;
    const Eigen::Index jp = j == nt - 1 ? nt - 1 : j + 1;
    const Scalar sf_lo = g.sin_face(j), sf_hi = g.sin_face(j + 1);
    const Scalar ang_w = ith2 / g.sin_theta(j);
    for (Eigen::Index i = 1; i + 1 < nr; ++i) {
      const Scalar c = psi(i, j);
      const Scalar radial = g.sigma(i) / g.delta(i) * ih2 *
                            (g.sigma_half(i) * (psi(i + 1, j) - c) - g.sigma_half(i - 1) * (c - psi(i - 1, j)));
      const Scalar angular = ang_w * (sf_hi * (psi(i, jp) - c) - sf_lo * (c - psi(i, jm)));
      dpi(i, j) = (radial + angular) / g.W(i, j);
    }
    const Eigen::Index n = nr - 1;
    if (g.boundary == Boundary::dirichlet) {
      dpsi(0, j) = 0;
      dpsi(n, j) = 0;
      dpi(0, j) = 0;
      dpi(n, j) = 0;
    } else {
      const Scalar i2h = Scalar(1) / (Scalar(2) * g.drs);
      // (d_t - d_r*) psi = 0 inward, (d_t + d_r*) psi + psi/r = 0 outward, differentiated in t
      dpi(0, j) = (Scalar(-3) * pi(0, j) + Scalar(4) * pi(1, j) - pi(2, j)) * i2h;
      dpi(n, j) = -(Scalar(3) * pi(n, j) - Scalar(4) * pi(n - 1, j) + pi(n - 2, j)) * i2h - pi(n, j) / g.r(n);
    }
  }
}

template <typename Scalar>
struct Derivative {
  typename Grid<Scalar>::Array2 psi, pi;
};

template <typename Scalar>
Derivative<Scalar> rhs(const Grid<Scalar>& g, const FieldState<Scalar>& s) {
  Derivative<Scalar> d;
  rhs_into(g, s.psi, s.pi, d.psi, d.pi);
  return d;
}

// Classical RK4 with reusable stage buffers.
template <typename Scalar>
class Stepper {
 public:
  using Array2 = typename Grid<Scalar>::Array2;

  explicit Stepper(const Grid<Scalar>& g) : g_(g) {}

  void step(FieldState<Scalar>& s, Scalar dt) {
    rhs_into(g_, s.psi, s.pi, k1p_, k1q_);
    tp_ = s.psi + (dt / 2) * k1p_;
    tq_ = s.pi + (dt / 2) * k1q_;
    rhs_into(g_, tp_, tq_, k2p_, k2q_);
    tp_ = s.psi + (dt / 2) * k2p_;
    tq_ = s.pi + (dt / 2) * k2q_;
    rhs_into(g_, tp_, tq_, k3p_, k3q_);
    tp_ = s.psi + dt * k3p_;
    tq_ = s.pi + dt * k3q_;
    rhs_into(g_, tp_, tq_, k4p_, k4q_);
    s.psi += (dt / 6) * (k1p_ + 2 * k2p_ + 2 * k3p_ + k4p_);
    s.pi += (dt / 6) * (k1q_ + 2 * k2q_ + 2 * k3q_ + k4q_);
    s.t += dt;
  }

 private:
  const Grid<Scalar>& g_;
  Array2 k1p_, k1q_, k2p_, k2q_, k3p_, k3q_, k4p_, k4q_, tp_, tq_;
};

template <typename Scalar>
FieldState<Scalar> step_rk4(const Grid<Scalar>& g, const FieldState<Scalar>& s, Scalar dt) {
  FieldState<Scalar> out = s;
  Stepper<Scalar>(g).step(out, dt);
  return out;
}

template <typename Scalar>
FieldState<Scalar> zero_state(const Grid<Scalar>& g) {
  FieldState<Scalar> s;
  s.psi = Grid<Scalar>::Array2::Zero(g.nr, g.ntheta);
  s.pi = s.psi;
  return s;
}

// psi = A exp(-(r*-r0*)^2/sigma^2) P_ell(cos theta), pi = 0
template <typename Scalar>
FieldState<Scalar> gaussian(const Grid<Scalar>& g, const GaussianData& d) {
  if (d.ell < 0) throw ConfigError("data.ell must be >= 0");
  if (!(d.sigma > 0)) throw ConfigError("data.sigma must be positive");
  FieldState<Scalar> s = zero_state(g);
  for (Eigen::Index j = 0; j < g.ntheta; ++j) {
    const Scalar P = Scalar(std::legendre(static_cast<unsigned>(d.ell), static_cast<double>(g.cos_theta(j))));
    for (Eigen::Index i = 0; i < g.nr; ++i) {
      const Scalar x = (g.rs(i) - Scalar(d.r0star)) / Scalar(d.sigma);
      s.psi(i, j) = Scalar(d.A) * std::exp(-x * x) * P;
    }
  }
  if (g.boundary == Boundary::dirichlet) {
    s.psi.row(0).setZero();
    s.psi.row(g.nr - 1).setZero();
  }
  return s;
}

// Samples a fine-grid field at the nodes of a coarse grid (same r* range)
// with 4-point Lagrange interpolation in r* and theta, even reflection across the poles.
template <typename Scalar>
typename Grid<Scalar>::Array2 sample_on(const Grid<Scalar>& fine, const typename Grid<Scalar>::Array2& f,
                                        const Grid<Scalar>& coarse) {
  typename Grid<Scalar>::Array2 out(coarse.nr, coarse.ntheta);
  auto weights = [](Scalar x, Scalar w[4]) {  // nodes at -1, 0, 1, 2
    w[0] = -x * (x - 1) * (x - 2) / 6;
    w[1] = (x + 1) * (x - 1) * (x - 2) / 2;
    w[2] = -(x + 1) * x * (x - 2) / 2;
    w[3] = (x + 1) * x * (x - 1) / 6;
  };
  auto reflect = [&](Eigen::Index j) {
    if (j < 0) return -j - 1;
    if (j >= fine.ntheta) return 2 * fine.ntheta - j - 1;
    return j;
  };
  for (Eigen::Index jc = 0; jc < coarse.ntheta; ++jc) {
    const Scalar y = coarse.theta(jc) / fine.dtheta - Scalar(0.5);
    Eigen::Index j0 = static_cast<Eigen::Index>(std::floor(static_cast<double>(y)));
    Scalar wy[4];
    weights(y - Scalar(j0), wy);
    for (Eigen::Index ic = 0; ic < coarse.nr; ++ic) {
      const Scalar x = (coarse.rs(ic) - fine.rstar_min) / fine.drs;
      Eigen::Index i0 = static_cast<Eigen::Index>(std::floor(static_cast<double>(x) + 1e-9));
      i0 = std::clamp<Eigen::Index>(i0, 1, fine.nr - 3);
      Scalar wx[4];
      weights(x - Scalar(i0), wx);
      Scalar acc = 0;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) acc += wx[a] * wy[b] * f(i0 - 1 + a, reflect(j0 - 1 + b));
      out(ic, jc) = acc;
    }
  }
  return out;
}

extern template Grid<double> make_grid<double>(const Params&, const GridConfig&);
extern template void rhs_into<double>(const Grid<double>&, const Grid<double>::Array2&, const Grid<double>::Array2&,
                                      Grid<double>::Array2&, Grid<double>::Array2&);
extern template class Stepper<double>;

}  // namespace morawetz
