#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "morawetz/geometry.hpp"

namespace morawetz {

// ---------------------------------------------------------------------------
// Params-only multiplier functions (templated, usable on Eigen arrays where
// no branching is involved).

template <typename Scalar>
Scalar eval_z(const Params& p, const Scalar& r) {
  const Scalar s = sigma(p, r);
  return delta(p, r) / (s * s);
}

template <typename Scalar>
Scalar eval_w(const Params& p, const Scalar& r) {
  const Scalar M(p.M);
  if (r <= r_star_pt<Scalar>(p)) return Scalar(1) / (Scalar(4) * M);
  const Scalar s = sigma(p, r);
  return Scalar(2) * r * delta(p, r) / (s * s);
}

template <typename Scalar>
Scalar eval_w_prime(const Params& p, const Scalar& r) {
  if (r <= r_star_pt<Scalar>(p)) return Scalar(0);
  const Scalar M(p.M);
  const Scalar s = sigma(p, r);
  const Scalar d = r - M;
  // d/dr [2 r d^2 / s^2]
  return (Scalar(2) * d * d + Scalar(4) * r * d) / (s * s) - Scalar(8) * r * r * d * d / (s * s * s);
}

// u' = (r^2+M^2)^2 w / (r-M)^2
template <typename Scalar>
Scalar eval_u_prime(const Params& p, const Scalar& r) {
  const Scalar s = sigma(p, r);
  return s * s * eval_w(p, r) / delta(p, r);
}

template <typename Scalar>
Scalar eval_V(const Params& p, const Scalar& r) {
  if (r <= r_star_pt<Scalar>(p)) return Scalar(0);
  const Scalar M(p.M);
  const Scalar M2 = M * M;
  const Scalar s = sigma(p, r);
  const Scalar r2 = r * r;
  return Scalar(3) * M * delta(p, r) * (r2 * r2 - Scalar(6) * M2 * r2 + M2 * M2) / (s * s * s * s);
}

template <typename Scalar>
Scalar eval_wT(const Params& p, const Scalar& r) {
  const Scalar d = r - r_trap<Scalar>(p);
  const Scalar r7 = r * r * r * r * r * r * r;
  return -delta(p, r) * d * d / r7;
}

template <typename Scalar>
Scalar eval_wT_prime(const Params& p, const Scalar& r) {
  const Scalar s = r - Scalar(p.M);
  const Scalar d = r - r_trap<Scalar>(p);
  const Scalar r7 = r * r * r * r * r * r * r;
  return -(Scalar(2) * s * d * d + Scalar(2) * s * s * d) / r7 + Scalar(7) * s * s * d * d / (r7 * r);
}

// Quartic Q(x) with -1/4 d_r(Delta d_r w_T) = (r-M)^2 M^4 Q(r/M) / (2 r^9).
template <typename Scalar>
Scalar quartic(const Scalar& x) {
  using std::sqrt;
  const Scalar s2 = sqrt(Scalar(2));
  return (((Scalar(3) * x - Scalar(3) * (Scalar(9) + Scalar(4) * s2)) * x + (Scalar(93) + Scalar(68) * s2)) * x -
          Scalar(7) * (Scalar(21) + Scalar(16) * s2)) * x +
         Scalar(56) * s2 + Scalar(84);
}

template <typename Scalar>
Scalar quartic_prime(const Scalar& x) {
  using std::sqrt;
  const Scalar s2 = sqrt(Scalar(2));
  return ((Scalar(12) * x - Scalar(9) * (Scalar(9) + Scalar(4) * s2)) * x + Scalar(2) * (Scalar(93) + Scalar(68) * s2)) * x -
         Scalar(7) * (Scalar(21) + Scalar(16) * s2);
}

template <typename Scalar>
Scalar eval_boxwT_expanded(const Params& p, const Scalar& r) {
  const Scalar M(p.M);
  const Scalar r3 = r * r * r;
  return delta(p, r) * M * M * M * M * quartic(r / M) / (Scalar(2) * r3 * r3 * r3);
}

// y0 solves y0' + (2/r) y0 - ((r^2+M^2)/4) y0^2 = 0.
template <typename Scalar>
Scalar eval_y0(const Params& p, const Scalar& r) {
  const Scalar M(p.M);
  return Scalar(-4) / (r * (r + M) * (r - M));
}

template <typename Scalar>
Scalar eval_y0_prime(const Params& p, const Scalar& r) {
  const Scalar M(p.M);
  const Scalar c = r * (r + M) * (r - M);
  return Scalar(4) * (Scalar(3) * r * r - M * M) / (c * c);
}

struct TheoremWeights {
  double dr;   // (1/r^3)(1-M/r)^2
  double dt;   // (1/r)(1-r_trap/r)^2 / r^2
  double ang;  // (1/r)(1-r_trap/r)^2, multiplies |slashed nabla psi|^2
  double psi;  // (1/r^4)(1-M/r)^2
};

TheoremWeights theorem_coeffs(const Params& p, double r);

// ---------------------------------------------------------------------------
// Multiplier set

enum class JProfile { transport, hardy_taper };

std::string to_string(JProfile j);
JProfile j_profile_from_string(const std::string& s);

// v = (amplitude/M^2) s^3/(s^3+(rise M)^3) / (1+(r/(falloff M))^power), s = r-M.
struct TransportJ {
  double amplitude = 0.025;
  double rise = 0.35;
  double falloff = 5.0;
  double power = 7.0;
};

// Deliberate breakage used to show the certificates can fail.
struct Sabotage {
  bool flip_C1 = false;
  double bound_scale = 1.0;
};

struct MultiplierOptions {
  double r_e = 1.1;
  double eta = 0.5;
  double delta_T = 0.0;  // 0 selects the dyadic search
  JProfile profile = JProfile::transport;
  TransportJ transport;
  double outer_cutoff = 2.0;  // hardy_taper: v reaches 0 at outer_cutoff * r_*
  Sabotage sabotage;
};

// Hermite pieces of the hardy_taper profile.
struct Taper {
  double inner_a = 0.0;  // v = s^3 (inner_a + inner_b s) on (M, r_e)
  double inner_b = 0.0;
  double outer_begin = 0.0;
  double outer_end = 0.0;
  double outer_value = 0.0;
  double outer_slope = 0.0;
};

struct DeltaTError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class MultiplierSet {
 public:
  static MultiplierSet build(const Params& p, const MultiplierOptions& opt = {});

  const Params& params() const { return params_; }
  const MultiplierOptions& options() const { return options_; }
  double M() const { return params_.M; }
  double C1() const { return C1_; }
  double C2() const { return C2_; }
  double c0() const { return c0_; }
  double c1() const { return c1_; }
  double r_e() const { return options_.r_e; }
  double eta() const { return options_.eta; }
  double delta_T() const { return delta_T_; }
  double r_trap() const { return r_trap_; }
  double r_star() const { return r_star_; }
  // A~(r_*) = M^2 - C2, the sharp constant of the A lower bound.
  double A_tilde_star() const { return params_.M * params_.M - C2_; }
  const std::array<double, 4>& quartic_roots() const { return roots_; }
  const Taper& taper() const { return taper_; }
  JProfile profile() const { return options_.profile; }
  // Radii where v, w or their derivatives are not smooth.
  std::vector<double> breakpoints() const;

 private:
  Params params_;
  MultiplierOptions options_;
  double C1_ = 0, C2_ = 0, c0_ = 0, c1_ = 0, delta_T_ = 0;
  double r_trap_ = 0, r_star_ = 0;
  std::array<double, 4> roots_{};
  Taper taper_;
};

void validate(const Params& p, const MultiplierOptions& opt);

// Closed form of u without the integration constant (r <= r_*).
double u_left_raw(const Params& p, double r);

double eval_u(const MultiplierSet& ms, double r);
double eval_A_tilde(const MultiplierSet& ms, double r);
double eval_A(const MultiplierSet& ms, double r);
double eval_boxwT(const MultiplierSet& ms, double r);
double eval_v(const MultiplierSet& ms, double r);
double eval_v_prime(const MultiplierSet& ms, double r);

// Ascending roots of Q, all > 1; throws std::runtime_error otherwise.
std::array<double, 4> quartic_roots(const Params& p);

double c1_of(const MultiplierSet& ms, double r_e);

// Minimum over the search grid of 1_{r>r_e}/r^2 + delta*boxwT - (1-M/r)^2/r^2.
struct DeltaTMargin {
  double min_margin;
  double argmin;
};
DeltaTMargin delta_T_margin(const MultiplierSet& ms, double delta);
std::vector<double> delta_T_grid(const MultiplierSet& ms);

// Smallest feasible 2^k, k in [-27, 10]; throws DeltaTError if none.
double find_delta_T(const MultiplierSet& ms);

struct CoefficientSample {
  double r, z, u, w, v, wT, A, V, boxwT;
  TheoremWeights th;
};

CoefficientSample sample(const MultiplierSet& ms, double r);

// Points of a logarithmic grid in r - M (inclusive endpoints).
std::vector<double> log_grid(double M, double r_min, double r_max, std::size_t count);

}  // namespace morawetz
