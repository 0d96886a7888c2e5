#pragma once

// Extremal Kerr (a = M) background in Boyer-Lindquist coordinates.
//
// The scalar functions are templates so they evaluate on double and long
// double; delta, sigma and q2 also accept Eigen arrays (coefficient-wise).

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace morawetz {

struct Params {
  double M = 1.0;
};

inline void validate(const Params& p) {
  if (!(p.M > 0.0) || !std::isfinite(p.M)) throw std::domain_error("M must be positive and finite");
}

template <typename Scalar>
struct Point {
  Scalar r;
  Scalar theta;
};

template <typename Scalar>
Scalar delta(const Params& p, const Scalar& r) {
  const Scalar s = r - p.M;
  return s * s;
}

// r^2 + M^2
template <typename Scalar>
Scalar sigma(const Params& p, const Scalar& r) {
  return r * r + p.M * p.M;
}

template <typename Scalar>
Scalar q2(const Params& p, const Point<Scalar>& pt) {
  using std::cos;
  const Scalar c = cos(pt.theta);
  return pt.r * pt.r + p.M * p.M * c * c;
}

template <typename Scalar>
Scalar trapping_poly(const Params& p, const Scalar& r) {
  const Scalar M(p.M);
  return (r - M) * (r * r - Scalar(2) * M * r - M * M);
}

template <typename Scalar = double>
Scalar r_trap(const Params& p) {
  using std::sqrt;
  return (Scalar(1) + sqrt(Scalar(2))) * Scalar(p.M);
}

template <typename Scalar = double>
Scalar r_star_pt(const Params& p) {
  using std::sqrt;
  return (Scalar(2) + sqrt(Scalar(3))) * Scalar(p.M);
}

template <typename Scalar>
Scalar tortoise(const Params& p, Scalar r) {
  using std::log;
  const Scalar M(p.M);
  if (!(r > M)) throw std::domain_error("tortoise: r must exceed M");
  const Scalar s = r - M;
  return s + Scalar(2) * M * log(s / M) - Scalar(2) * M * M / s;
}

// dr*/dr
template <typename Scalar>
Scalar tortoise_prime(const Params& p, const Scalar& r) {
  return sigma(p, r) / delta(p, r);
}

struct InversionError : std::runtime_error {
  int iterations;
  InversionError(const std::string& what, int it) : std::runtime_error(what), iterations(it) {}
};

// Newton in x = log((r-M)/M), where r*(x) = M(e^x + 2x - 2e^{-x}) has
// derivative >= (2 + 2*sqrt(2))M, safeguarded by a bisection bracket.
template <typename Scalar>
Scalar invert_tortoise(const Params& p, Scalar rs) {
  using std::abs;
  using std::exp;
  using std::max;
  const Scalar M(p.M);
  if (!std::isfinite(static_cast<double>(rs))) throw std::domain_error("invert_tortoise: non-finite r*");
  const Scalar tol = Scalar(1e-12) * max(Scalar(1), abs(rs));
  auto f = [&](Scalar x) { return M * (exp(x) + Scalar(2) * x - Scalar(2) * exp(-x)) - rs; };
  auto df = [&](Scalar x) { return M * (exp(x) + Scalar(2) + Scalar(2) * exp(-x)); };

  Scalar lo = Scalar(-1), hi = Scalar(1);
  int grow = 0;
  while (f(lo) > 0 && grow++ < 200) lo = Scalar(2) * lo - Scalar(1);
  while (f(hi) < 0 && grow++ < 400) hi = Scalar(2) * hi + Scalar(1);

  Scalar x = rs > 0 ? (hi + lo) / 2 : lo;
  if (rs < Scalar(-4) * M) x = -std::log(static_cast<double>(-rs / (Scalar(2) * M)));
  if (rs > Scalar(4) * M) x = std::log(static_cast<double>(rs / M));
  if (!(x > lo && x < hi)) x = (lo + hi) / 2;

  constexpr int max_iter = 200;
  for (int it = 1; it <= max_iter; ++it) {
    const Scalar fx = f(x);
    if (fx > 0) hi = x; else lo = x;
    Scalar next = x - fx / df(x);
    if (!(next > lo && next < hi)) next = (lo + hi) / 2;
    x = next;
    const Scalar r = M + M * exp(x);
    if (!(r > M)) continue;
    // near the horizon r = M + s cannot resolve r* to tol; accept the rounding floor there
    const Scalar floor = Scalar(4) * std::numeric_limits<Scalar>::epsilon() * r * tortoise_prime(p, r);
    if (abs(tortoise(p, r) - rs) <= max(tol, floor)) return r;
  }
  throw InversionError("invert_tortoise: no convergence after " + std::to_string(max_iter) + " iterations",
                       max_iter);
}

template <typename Scalar>
Scalar g_hatT_hatT(const Params& p, const Point<Scalar>& pt) {
  const Scalar s = sigma(p, pt.r);
  return -delta(p, pt.r) * q2(p, pt) / (s * s);
}

// Coefficient of d_t^2 after multiplying the wave equation by |q|^2 (with a sign flip):
// (r^2+M^2)^2/Delta - M^2 sin^2(theta).
template <typename Scalar>
Scalar time_weight(const Params& p, const Scalar& r, const Scalar& theta) {
  using std::sin;
  const Scalar s = sigma(p, r);
  const Scalar st = sin(theta);
  return s * s / delta(p, r) - Scalar(p.M * p.M) * st * st;
}

}  // namespace morawetz
