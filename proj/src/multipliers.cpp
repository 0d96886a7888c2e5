#include "morawetz/multipliers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace morawetz {

namespace {

constexpr double kGolden = 0.6180339887498949;

// Golden-section minimisation of f on [a, b]; returns (x, f(x)).
std::pair<double, double> golden_min(const std::function<double(double)>& f, double a, double b, int iters = 80) {
  double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters && b - a > 1e-15 * (1.0 + std::abs(a)); ++i) {
    if (f1 < f2) {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - kGolden * (b - a); f1 = f(x1);
    } else {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + kGolden * (b - a); f2 = f(x2);
    }
  }
  return f1 < f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

double y_half(const Params& p, double r) { return 0.5 * eval_y0(p, r); }
double y_half_prime(const Params& p, double r) { return 0.5 * eval_y0_prime(p, r); }

void hermite(double t, double& h00, double& h10, double& d00, double& d10) {
  h00 = (2 * t - 3) * t * t + 1;
  h10 = ((t - 2) * t + 1) * t;
  d00 = 6 * t * t - 6 * t;
  d10 = (3 * t - 4) * t + 1;
}

}  // namespace

std::string to_string(JProfile j) { return j == JProfile::transport ? "transport" : "hardy_taper"; }

JProfile j_profile_from_string(const std::string& s) {
  if (s == "transport") return JProfile::transport;
  if (s == "hardy_taper") return JProfile::hardy_taper;
  throw std::invalid_argument("unknown J profile '" + s + "'");
}

TheoremWeights theorem_coeffs(const Params& p, double r) {
  const double a = 1.0 - p.M / r;
  const double b = 1.0 - r_trap(p) / r;
  const double r2 = r * r;
  return {a * a / (r2 * r), b * b / (r2 * r), b * b / r, a * a / (r2 * r2)};
}

std::vector<double> log_grid(double M, double r_min, double r_max, std::size_t count) {
  std::vector<double> g(count);
  const double a = std::log(r_min - M), b = std::log(r_max - M);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    g[i] = M + std::exp(a + (b - a) * t);
  }
  if (count > 1) {
    g.front() = r_min;
    g.back() = r_max;
  }
  return g;
}

void validate(const Params& p, const MultiplierOptions& opt) {
  validate(p);
  if (!(opt.r_e > p.M)) throw std::domain_error("r_e must exceed M");
  if (!(opt.r_e < r_star_pt(p))) throw std::domain_error("r_e must be below r_*");
  if (!(opt.eta > 0.0 && opt.eta < 1.0)) throw std::domain_error("eta must lie in (0,1)");
  if (!(opt.delta_T >= 0.0)) throw std::domain_error("delta_T must be >= 0");
  if (!(opt.outer_cutoff > 1.0)) throw std::domain_error("outer_cutoff must exceed 1");
  const auto& t = opt.transport;
  if (!(t.amplitude >= 0.0 && t.rise > 0.0 && t.falloff > 0.0 && t.power > 0.0))
    throw std::domain_error("transport J parameters out of range");
}

std::array<double, 4> quartic_roots(const Params&) {
  // Q is dimensionless in x = r/M; scan [1, 20] for sign changes.
  std::array<double, 4> roots{};
  int found = 0;
  const int n = 4000;
  double a = 1.0, fa = quartic(a);
  for (int i = 1; i <= n && found < 4; ++i) {
    const double b = 1.0 + 19.0 * i / n;
    const double fb = quartic(b);
    if (fa == 0.0 || (fa < 0) != (fb < 0)) {
      double lo = a, hi = b, flo = fa;
      double x = 0.5 * (lo + hi);
      for (int it = 0; it < 200; ++it) {
        const double fx = quartic(x);
        if ((fx < 0) == (flo < 0)) { lo = x; flo = fx; } else { hi = x; }
        double next = x - fx / quartic_prime(x);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) < 1e-16 * x) { x = next; break; }
        x = next;
      }
      roots[found++] = x;
    }
    a = b;
    fa = fb;
  }
  if (found != 4) throw std::runtime_error("quartic: expected four real roots above 1");
  for (double x : roots) {
    if (!(x > 1.0) || std::abs(quartic(x)) > 1e-10) throw std::runtime_error("quartic: bad root");
  }
  return roots;
}

double u_left_raw(const Params& p, double r) {
  const double M = p.M;
  return -M * M * M / (r - M) + 1.25 * M * r + 0.25 * r * r + r * r * r / (12.0 * M) + 2.0 * M * M * std::log(r - M);
}

double eval_u(const MultiplierSet& ms, double r) {
  if (!(r > ms.M())) throw std::domain_error("u: r must exceed M");
  if (r <= ms.r_star()) return u_left_raw(ms.params(), r) + ms.C1();
  return r * r + ms.C2();
}

double eval_A_tilde(const MultiplierSet& ms, double r) {
  if (!(r > ms.M())) throw std::domain_error("A: r must exceed M");
  if (r > ms.r_star()) return ms.A_tilde_star();
  return sigma(ms.params(), r) * eval_u_prime(ms.params(), r) / (2.0 * r) - eval_u(ms, r);
}

// (r-M)^4/(r^2+M^2) d_r(u/(r^2+M^2)) = 2r(r-M)^4/(r^2+M^2)^3 A~(r)
double eval_A(const MultiplierSet& ms, double r) {
  const double d2 = delta(ms.params(), r);
  const double s = sigma(ms.params(), r);
  return 2.0 * r * d2 * d2 / (s * s * s) * eval_A_tilde(ms, r);
}

double eval_boxwT(const MultiplierSet& ms, double r) {
  const double M = ms.M();
  const auto& x = ms.quartic_roots();
  const double r3 = r * r * r;
  return 1.5 * delta(ms.params(), r) / (r3 * r3 * r3) * (r - x[0] * M) * (r - x[1] * M) * (r - x[2] * M) *
         (r - x[3] * M);
}

double eval_v(const MultiplierSet& ms, double r) {
  if (!(r > ms.M())) throw std::domain_error("v: r must exceed M");
  const Params& p = ms.params();
  const double M = p.M;
  if (ms.profile() == JProfile::transport) {
    const auto& t = ms.options().transport;
    const double s = r - M, c = t.rise * M;
    const double s3 = s * s * s;
    const double g = s3 / (s3 + c * c * c);
    const double h = 1.0 / (1.0 + std::pow(r / (t.falloff * M), t.power));
    return t.amplitude / (M * M) * g * h;
  }
  const Taper& tp = ms.taper();
  if (r < ms.r_e()) {
    const double s = r - M;
    return s * s * s * (tp.inner_a + tp.inner_b * s);
  }
  if (r <= ms.r_star()) return ms.c1() * y_half(p, r);
  if (r >= tp.outer_end) return 0.0;
  const double L = tp.outer_end - tp.outer_begin;
  double h00, h10, d00, d10;
  hermite((r - tp.outer_begin) / L, h00, h10, d00, d10);
  return h00 * tp.outer_value + h10 * L * tp.outer_slope;
}

double eval_v_prime(const MultiplierSet& ms, double r) {
  if (!(r > ms.M())) throw std::domain_error("v: r must exceed M");
  const Params& p = ms.params();
  const double M = p.M;
  if (ms.profile() == JProfile::transport) {
    const auto& t = ms.options().transport;
    const double s = r - M, c = t.rise * M;
    const double s3 = s * s * s, c3 = c * c * c;
    const double g = s3 / (s3 + c3);
    const double gp = 3.0 * s * s * c3 / ((s3 + c3) * (s3 + c3));
    const double q = std::pow(r / (t.falloff * M), t.power);
    const double h = 1.0 / (1.0 + q);
    const double hp = -t.power * q / r * h * h;
    return t.amplitude / (M * M) * (gp * h + g * hp);
  }
  const Taper& tp = ms.taper();
  if (r < ms.r_e()) {
    const double s = r - M;
    return 3.0 * s * s * tp.inner_a + 4.0 * s * s * s * tp.inner_b;
  }
  if (r <= ms.r_star()) return ms.c1() * y_half_prime(p, r);
  if (r >= tp.outer_end) return 0.0;
  const double L = tp.outer_end - tp.outer_begin;
  double h00, h10, d00, d10;
  hermite((r - tp.outer_begin) / L, h00, h10, d00, d10);
  return d00 * tp.outer_value / L + d10 * tp.outer_slope;
}

double c1_of(const MultiplierSet& ms, double r_e) {
  if (!(r_e > ms.M() && r_e < ms.r_star())) throw std::domain_error("c1_of: need M < r_e < r_*");
  const auto g = log_grid(ms.M(), r_e, ms.r_star(), 10000);
  std::size_t best = 0;
  double fbest = eval_A(ms, g[0]);
  for (std::size_t i = 1; i < g.size(); ++i) {
    const double f = eval_A(ms, g[i]);
    if (f < fbest) { fbest = f; best = i; }
  }
  const double a = g[best == 0 ? 0 : best - 1];
  const double b = g[std::min(best + 1, g.size() - 1)];
  const auto [x, fx] = golden_min([&](double r) { return eval_A(ms, r); }, a, b);
  (void)x;
  return std::min(fbest, fx);
}

std::vector<double> delta_T_grid(const MultiplierSet& ms) {
  const double M = ms.M();
  auto g = log_grid(M, M * (1.0 + 1e-8), 1e4 * M, 10000);
  g.push_back(ms.r_e());
  for (double x : ms.quartic_roots()) g.push_back(x * M);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

DeltaTMargin delta_T_margin(const MultiplierSet& ms, double dT) {
  const double M = ms.M();
  const double r_e = ms.r_e();
  auto f = [&](double r) {
    const double r2 = r * r;
    const double a = 1.0 - M / r;
    return (r > r_e ? 1.0 / r2 : 0.0) + dT * eval_boxwT(ms, r) - a * a / r2;
  };
  const auto g = delta_T_grid(ms);
  std::size_t best = 0;
  double fbest = f(g[0]);
  for (std::size_t i = 1; i < g.size(); ++i) {
    const double v = f(g[i]);
    if (v < fbest) { fbest = v; best = i; }
  }
  double a = g[best == 0 ? 0 : best - 1];
  double b = g[std::min(best + 1, g.size() - 1)];
  // keep the refinement bracket on one side of the indicator jump
  if (a < r_e && b > r_e) (g[best] <= r_e ? b : a) = r_e;
  auto [x, fx] = golden_min(f, a, b);
  if (fx < fbest) return {fx, x};
  return {fbest, g[best]};
}

double find_delta_T(const MultiplierSet& ms) {
  for (int k = -27; k <= 10; ++k) {
    const double d = std::ldexp(1.0, k);
    if (delta_T_margin(ms, d).min_margin >= 0.0) return d;
  }
  throw DeltaTError("find_delta_T: no dyadic delta_T in [2^-27, 2^10] satisfies the inequality (r_e = " +
                    std::to_string(ms.r_e()) + ")");
}

std::vector<double> MultiplierSet::breakpoints() const {
  if (options_.profile == JProfile::hardy_taper) return {options_.r_e, r_star_, taper_.outer_end};
  return {r_star_};
}

MultiplierSet MultiplierSet::build(const Params& p, const MultiplierOptions& opt) {
  validate(p, opt);
  MultiplierSet ms;
  ms.params_ = p;
  ms.options_ = opt;
  const double M = p.M;
  ms.r_trap_ = morawetz::r_trap(p);
  ms.r_star_ = morawetz::r_star_pt(p);
  ms.C1_ = -u_left_raw(p, ms.r_trap_);
  if (opt.sabotage.flip_C1) ms.C1_ = -ms.C1_;
  ms.C2_ = u_left_raw(p, ms.r_star_) + ms.C1_ - ms.r_star_ * ms.r_star_;
  const double s2 = std::sqrt(2.0), s3 = std::sqrt(3.0);
  ms.c0_ = 2.0 * (2.0 + s3) * (1.0 + s2 - s3);
  ms.roots_ = morawetz::quartic_roots(p);
  ms.c1_ = c1_of(ms, opt.r_e);

  const double r_e = opt.r_e;
  const double se = r_e - M;
  const double V0 = ms.c1_ * y_half(p, r_e), V1 = ms.c1_ * y_half_prime(p, r_e);
  ms.taper_.inner_b = (V1 - 3.0 * V0 / se) / (se * se * se);
  ms.taper_.inner_a = V0 / (se * se * se) - ms.taper_.inner_b * se;
  ms.taper_.outer_begin = ms.r_star_;
  ms.taper_.outer_end = opt.outer_cutoff * ms.r_star_;
  ms.taper_.outer_value = ms.c1_ * y_half(p, ms.r_star_);
  ms.taper_.outer_slope = ms.c1_ * y_half_prime(p, ms.r_star_);

  ms.delta_T_ = opt.delta_T > 0.0 ? opt.delta_T : find_delta_T(ms);
  return ms;
}

CoefficientSample sample(const MultiplierSet& ms, double r) {
  const Params& p = ms.params();
  return {r,
          eval_z(p, r),
          eval_u(ms, r),
          eval_w(p, r),
          eval_v(ms, r),
          eval_wT(p, r),
          eval_A(ms, r),
          eval_V(p, r),
          eval_boxwT(ms, r),
          theorem_coeffs(p, r)};
}

}  // namespace morawetz
