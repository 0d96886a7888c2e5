#include "morawetz/certifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace morawetz {

namespace {

constexpr double kClosedFormTol = 1e-12;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

struct MinTracker {
  double value = std::numeric_limits<double>::infinity();
  double r = 0, theta = 0;
  void offer(double v, double rr, double th = 0.0) {
    if (v < value || std::isnan(v)) {
      value = v;
      r = rr;
      theta = th;
    }
  }
};

}  // namespace

std::vector<double> GridSpec::nodes(double M) const {
  if (count == 0) return {};
  if (spacing == Spacing::log_from_horizon) return log_grid(M, r_min, r_max, count);
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i)
    g[i] = count == 1 ? r_min : r_min + (r_max - r_min) * static_cast<double>(i) / static_cast<double>(count - 1);
  return g;
}

std::string GridSpec::describe() const {
  return "r in [" + fmt(r_min) + ", " + fmt(r_max) + "], " + std::to_string(count) + " points, " +
         (spacing == Spacing::log_from_horizon ? "log in r-M" : "linear");
}

std::vector<double> Grid2D::thetas() const {
  std::vector<double> t(n_theta);
  for (std::size_t j = 0; j < n_theta; ++j)
    t[j] = n_theta == 1 ? theta_min
                        : theta_min + (theta_max - theta_min) * static_cast<double>(j) / static_cast<double>(n_theta - 1);
  return t;
}

std::string Grid2D::describe() const {
  return r.describe() + " x theta in [" + fmt(theta_min) + ", " + fmt(theta_max) + "], " + std::to_string(n_theta) +
         " points";
}

Certificate make_certificate(std::string name, std::string grid, double margin, double r, double theta,
                             double tolerance, bool strict) {
  Certificate c;
  c.name = std::move(name);
  c.grid = std::move(grid);
  c.min_margin = margin;
  c.argmin_r = r;
  c.argmin_theta = theta;
  c.tolerance = tolerance;
  c.passed = std::isfinite(margin) && (strict ? margin > 0.0 : margin >= -tolerance);
  return c;
}

GridSpec default_radial_grid(const Params& p, std::size_t count) {
  return {p.M * (1.0 + 1e-8), 1e4 * p.M, count, Spacing::log_from_horizon};
}

Grid2D default_grid2d(const Params& p, std::size_t n_r, std::size_t n_theta) {
  Grid2D g;
  g.r = default_radial_grid(p, n_r);
  g.n_theta = n_theta;
  return g;
}

Certificate certify_A_bound(const MultiplierSet& ms, const GridSpec& grid, double K, const std::string& name) {
  const Params& p = ms.params();
  MinTracker m;
  for (double r : grid.nodes(p.M)) {
    const double d2 = delta(p, r);
    const double s = sigma(p, r);
    m.offer(eval_A(ms, r) - 2.0 * r * d2 * d2 / (s * s * s) * K, r);
  }
  return make_certificate(name, grid.describe(), m.value, m.r, 0.0, kClosedFormTol);
}

Certificate certify_A_bound(const MultiplierSet& ms, const GridSpec& grid) {
  const double K = ms.c0() * ms.M() * ms.M() * ms.options().sabotage.bound_scale;
  return certify_A_bound(ms, grid, K, "A_bound_c0");
}

Certificate certify_A_sharp(const MultiplierSet& ms, const GridSpec& grid) {
  return certify_A_bound(ms, grid, ms.A_tilde_star() * ms.options().sabotage.bound_scale, "A_bound_sharp");
}

Certificate certify_hardy(const MultiplierSet& ms, const Grid2D& grid, double lambda) {
  const Params& p = ms.params();
  const double M = p.M;
  MinTracker m;
  const auto thetas = grid.thetas();
  for (double r : grid.r.nodes(M)) {
    if (r < ms.r_e() || r > ms.r_star()) continue;
    const double y = lambda * eval_y0(p, r);
    const double yp = lambda * eval_y0_prime(p, r);
    const double rhs = sigma(p, r) / (r * r * (r + M) * (r + M) * delta(p, r));
    for (double th : thetas) {
      const double Q = q2(p, Point<double>{r, th});
      // relative to the right-hand side, which sets the scale near the horizon
      m.offer((yp + 2.0 * r / Q * y - 0.25 * Q * y * y - rhs) / rhs, r, th);
    }
  }
  return make_certificate("hardy_inequality", grid.describe() + " restricted to [r_e, r_*]", m.value, m.r, m.theta,
                          kClosedFormTol);
}

ChannelCoefficients combined_available(const MultiplierSet& ms, double r, double theta) {
  const Params& p = ms.params();
  const double M = p.M;
  const double rt = ms.r_trap();
  const double dT = ms.delta_T();
  const double eta = ms.eta();
  const double Q = q2(p, Point<double>{r, theta});
  const double st = std::sin(theta);
  const double s2 = M * M * st * st;
  const double sg = sigma(p, r);
  const double sg3 = sg * sg * sg;
  const double d2 = delta(p, r);
  const double dtr = (r - rt) * (r - rt);
  const double r7 = std::pow(r, 7);
  const double A = eval_A(ms, r);
  const double U = eval_u(ms, r) * trapping_poly(p, r) / sg3;
  const double v = eval_v(ms, r), vp = eval_v_prime(ms, r);

  ChannelCoefficients c;
  c.dr = (1.0 - eta) * A - 0.5 * dT * d2 * d2 * dtr / r7;
  c.dt = 0.5 * dT * dtr * (sg * sg - d2 * s2) / r7 + U * s2;
  c.ang = U - 0.5 * dT * d2 * dtr / r7;
  c.psi = eval_V(p, r) + 0.25 * (Q * vp + 2.0 * r * v) - Q * Q * v * v / (16.0 * eta * A) + dT * eval_boxwT(ms, r);
  return c;
}

ChannelCoefficients combined_target(const MultiplierSet& ms, double r, double theta) {
  const Params& p = ms.params();
  const double Q = q2(p, Point<double>{r, theta});
  const TheoremWeights w = theorem_coeffs(p, r);
  // angular weight multiplies |slashed nabla psi|^2 = (d_theta psi)^2 / r^2
  return {Q * w.dr, Q * w.dt, Q * w.ang / (r * r), Q * w.psi};
}

std::vector<Certificate> certify_combined(const MultiplierSet& ms, const Grid2D& grid) {
  MinTracker m[4];
  const auto thetas = grid.thetas();
  for (double r : grid.r.nodes(ms.M())) {
    if (r == ms.r_trap()) continue;
    for (double th : thetas) {
      const auto a = combined_available(ms, r, th);
      const auto t = combined_target(ms, r, th);
      m[0].offer(a.dr / t.dr, r, th);
      m[1].offer(a.dt / t.dt, r, th);
      m[2].offer(a.ang / t.ang, r, th);
      m[3].offer(a.psi / t.psi, r, th);
    }
  }
  static const char* names[4] = {"combined_dr", "combined_dt", "combined_angular", "combined_psi"};
  std::vector<Certificate> out;
  for (int k = 0; k < 4; ++k) {
    auto c = make_certificate(names[k], grid.describe(), m[k].value, m[k].r, m[k].theta, 0.0, true);
    c.note = "kappa = min available/target; delta_T = " + fmt(ms.delta_T()) + ", eta = " + fmt(ms.eta()) +
             ", J profile " + to_string(ms.profile());
    out.push_back(std::move(c));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Divergence identity

namespace {

struct Pieces {
  double F, w, wp, v;
};

Pieces pieces(const MultiplierSet& ms, const CurrentParts& parts, double r) {
  const Params& p = ms.params();
  Pieces c{0, 0, 0, 0};
  if (parts.stogin) {
    c.F = eval_z(p, r) * eval_u(ms, r);
    c.w = eval_w(p, r);
    c.wp = eval_w_prime(p, r);
  }
  if (parts.wT) {
    c.w += ms.delta_T() * eval_wT(p, r);
    c.wp += ms.delta_T() * eval_wT_prime(p, r);
  }
  if (parts.J) c.v = eval_v(ms, r);
  return c;
}

// |q|^2 P^t, |q|^2 P^r and |q|^2 sin(theta) P^theta
struct Flux {
  double t, r, th;
};

Flux flux(const MultiplierSet& ms, const ManufacturedField& f, const CurrentParts& parts, double t, double r,
          double theta) {
  const Params& p = ms.params();
  const double M = p.M;
  const Jet j = f(t, r, theta);
  const Pieces c = pieces(ms, parts, r);
  const double Q = q2(p, Point<double>{r, theta});
  const double D = delta(p, r);
  const double sg = sigma(p, r);
  const double st = std::sin(theta);
  const double gtt = -(sg * sg - D * M * M * st * st) / (Q * D);
  const double grr = D / Q;
  const double gthth = 1.0 / Q;
  const double grad2 = gtt * j.t * j.t + grr * j.r * j.r + gthth * j.th * j.th;
  const double Pt = gtt * (j.t * c.F * j.r + 0.5 * c.w * j.f * j.t);
  const double Pr = grr * c.F * j.r * j.r - 0.5 * c.F * grad2 + 0.5 * c.w * j.f * grr * j.r -
                    0.25 * grr * c.wp * j.f * j.f + 0.25 * c.v * j.f * j.f;
  const double Pth = gthth * (c.F * j.th * j.r + 0.5 * c.w * j.f * j.th);
  return {Q * Pt, Q * Pr, Q * st * Pth};
}

template <typename G>
double d4(G&& g, double x, double h) {
  return (g(x - 2 * h) - 8 * g(x - h) + 8 * g(x + h) - g(x + 2 * h)) / (12 * h);
}

}  // namespace

double q2_box(const Params& p, const Jet& j, double r, double theta) {
  const double M = p.M;
  const double D = delta(p, r);
  const double sg = sigma(p, r);
  const double st = std::sin(theta), ct = std::cos(theta);
  const double radial = 2.0 * (r - M) * j.r + D * j.rr;
  const double angular = j.thth + ct / st * j.th;
  return radial - sg * sg / D * j.tt + angular + M * M * st * st * j.tt;
}

double divergence_lhs(const MultiplierSet& ms, const ManufacturedField& f, const CurrentParts& parts, double t,
                      double r, double theta, double h) {
  const double dt = d4([&](double x) { return flux(ms, f, parts, x, r, theta).t; }, t, h);
  const double dr = d4([&](double x) { return flux(ms, f, parts, t, x, theta).r; }, r, h);
  const double dth = d4([&](double x) { return flux(ms, f, parts, t, r, x).th; }, theta, h);
  return dt + dr + dth / std::sin(theta);
}

double divergence_rhs(const MultiplierSet& ms, const ManufacturedField& f, const CurrentParts& parts, double t,
                      double r, double theta) {
  const Params& p = ms.params();
  const double M = p.M;
  const Jet j = f(t, r, theta);
  const Pieces c = pieces(ms, parts, r);
  const double Q = q2(p, Point<double>{r, theta});
  const double D = delta(p, r);
  const double sg = sigma(p, r);
  const double st = std::sin(theta);
  const double O = j.th * j.th + M * M * st * st * j.t * j.t;
  double out = 0.0;
  if (parts.stogin) {
    out += eval_A(ms, r) * j.r * j.r + eval_u(ms, r) * trapping_poly(p, r) / (sg * sg * sg) * O +
           eval_V(p, r) * j.f * j.f;
  }
  if (parts.wT) {
    const double wT = eval_wT(p, r);
    out += ms.delta_T() * (0.5 * wT * (D * j.r * j.r - sg * sg / D * j.t * j.t + O) + eval_boxwT(ms, r) * j.f * j.f);
  }
  if (parts.J) {
    const double v = eval_v(ms, r), vp = eval_v_prime(ms, r);
    out += 0.25 * (Q * vp + 2.0 * r * v) * j.f * j.f + 0.5 * Q * v * j.f * j.r;
  }
  out += q2_box(p, j, r, theta) * (c.F * j.r + 0.5 * c.w * j.f);
  return out;
}

DivergenceResult divergence_residual(const MultiplierSet& ms, const ManufacturedField& f, double h,
                                     const CurrentParts& parts, const DivergenceBox& box) {
  const double M = ms.M();
  const auto bps = ms.breakpoints();
  DivergenceResult res;
  res.residual = 0.0;
  for (std::size_t i = 0; i < box.n_r; ++i) {
    const double r = M * (box.r_min + (box.r_max - box.r_min) * static_cast<double>(i) / static_cast<double>(box.n_r - 1));
    bool skip = false;
    for (double b : bps) skip = skip || std::abs(r - b) < box.exclusion * M;
    if (skip) continue;
    for (std::size_t k = 0; k < box.n_theta; ++k) {
      const double th =
          box.theta_min + (box.theta_max - box.theta_min) * static_cast<double>(k) / static_cast<double>(box.n_theta - 1);
      const double t = box.t * M;
      const double lhs = divergence_lhs(ms, f, parts, t, r, th, h);
      const double rhs = divergence_rhs(ms, f, parts, t, r, th);
      const double e = std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
      ++res.points;
      if (e > res.residual || std::isnan(e)) {
        res.residual = e;
        res.argmax_r = r;
        res.argmax_theta = th;
      }
    }
  }
  return res;
}

DivergenceStudy divergence_study(const MultiplierSet& ms, const ManufacturedField& f, double h0, int levels,
                                 const CurrentParts& parts, const DivergenceBox& box) {
  DivergenceStudy s;
  s.field = f.name;
  double h = h0 * ms.M();
  for (int k = 0; k < levels; ++k, h *= 0.5) {
    s.h.push_back(h);
    s.residual.push_back(divergence_residual(ms, f, h, parts, box).residual);
  }
  // least squares slope of log(residual) against log(h)
  const std::size_t n = s.h.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(s.h[i]), y = std::log(s.residual[i]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  s.slope = n > 1 ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : 0.0;
  return s;
}

// ---------------------------------------------------------------------------

bool Report::passed() const {
  return std::all_of(certificates.begin(), certificates.end(), [](const Certificate& c) { return c.passed; });
}

std::vector<const Certificate*> Report::failures() const {
  std::vector<const Certificate*> out;
  for (const auto& c : certificates)
    if (!c.passed) out.push_back(&c);
  return out;
}

Report certify_all(const MultiplierSet& ms, const CertifyOptions& opt) {
  const Params& p = ms.params();
  const double M = p.M;
  const double rt = ms.r_trap(), rs = ms.r_star();
  Report rep;
  auto& out = rep.certificates;

  const GridSpec grid = default_radial_grid(p, opt.radial_points);
  const std::string gdesc = grid.describe();
  const auto nodes = grid.nodes(M);

  out.push_back(make_certificate("u_normalization", "r = r_trap", -std::abs(eval_u(ms, rt)) / (M * M), rt, 0.0,
                                 kClosedFormTol));
  {
    const double jump = std::abs(u_left_raw(p, rs) + ms.C1() - (rs * rs + ms.C2())) / (M * M);
    out.push_back(make_certificate("u_continuous_at_r_star", "r = r_*", -jump, rs, 0.0, kClosedFormTol));
  }
  {
    MinTracker inc, sign, w, U, V, Vin, At;
    for (double r : nodes) {
      inc.offer(eval_u_prime(p, r), r);
      if (r != rt) sign.offer(eval_u(ms, r) / (r - rt), r);
      w.offer(eval_w(p, r), r);
      U.offer(eval_u(ms, r) * trapping_poly(p, r) / std::pow(sigma(p, r), 3), r);
      V.offer(eval_V(p, r), r);
      if (r <= rs) {
        Vin.offer(-std::abs(eval_V(p, r)), r);
        // d/dr A~ = (r^2+M^2)/(2r) (u'' - u'/r), u'' from u' = (r^2+M^2)^2/(4M (r-M)^2)
        const double sg = sigma(p, r), s = r - M;
        const double up = sg * sg / (4.0 * M * s * s);
        const double upp = sg * (2.0 * r * s - sg) / (2.0 * M * s * s * s);
        At.offer(-(sg / (2.0 * r)) * (upp - up / r) * s * s * s / (M * M * M), r);
      }
    }
    out.push_back(make_certificate("u_increasing", gdesc, inc.value, inc.r, 0.0, 0.0, true));
    out.push_back(make_certificate("u_sign", gdesc + " (u/(r-r_trap))", sign.value, sign.r, 0.0, 0.0, true));
    out.push_back(make_certificate("w_positive", gdesc, w.value, w.r, 0.0, 0.0, true));
    out.push_back(make_certificate("U_channel_sign", gdesc, U.value, U.r, 0.0, kClosedFormTol));
    out.push_back(make_certificate("V_nonnegative", gdesc, V.value, V.r, 0.0, kClosedFormTol));
    out.push_back(make_certificate("V_zero_inside_r_star", gdesc + " restricted to r <= r_*", Vin.value, Vin.r, 0.0, 0.0));
    out.push_back(
        make_certificate("A_tilde_nonincreasing", gdesc + " restricted to r <= r_*, scaled by (r-M)^3", At.value, At.r,
                         0.0, kClosedFormTol));
  }
  {
    const double wl = 1.0 / (4.0 * M);
    const double wr = 2.0 * rs * delta(p, rs) / std::pow(sigma(p, rs), 2);
    const double sg = sigma(p, rs), d = rs - M;
    const double wpr = (2.0 * d * d + 4.0 * rs * d) / (sg * sg) - 8.0 * rs * rs * d * d / (sg * sg * sg);
    const double gap = std::max(std::abs(wl - wr) * M, std::abs(wpr) * M * M);
    out.push_back(make_certificate("w_C1_at_r_star", "r = r_*", -gap, rs, 0.0, 1e-14));
  }
  out.push_back(certify_A_bound(ms, grid));
  out.push_back(certify_A_sharp(ms, grid));
  out.push_back(make_certificate("A_tilde_star_exceeds_c0", "r = r_*",
                                 (ms.A_tilde_star() - ms.c0() * M * M) / (M * M), rs, 0.0, 0.0, true));
  {
    const auto& x = ms.quartic_roots();
    const double s2 = std::sqrt(2.0);
    const double e1 = x[0] + x[1] + x[2] + x[3];
    const double e2 = x[0] * x[1] + x[0] * x[2] + x[0] * x[3] + x[1] * x[2] + x[1] * x[3] + x[2] * x[3];
    const double e3 = x[0] * x[1] * x[2] + x[0] * x[1] * x[3] + x[0] * x[2] * x[3] + x[1] * x[2] * x[3];
    const double e4 = x[0] * x[1] * x[2] * x[3];
    const double err = std::max({std::abs(e1 - (9.0 + 4.0 * s2)) / (9.0 + 4.0 * s2),
                                 std::abs(e2 - (93.0 + 68.0 * s2) / 3.0) / ((93.0 + 68.0 * s2) / 3.0),
                                 std::abs(e3 - 7.0 * (21.0 + 16.0 * s2) / 3.0) / (7.0 * (21.0 + 16.0 * s2) / 3.0),
                                 std::abs(e4 - (56.0 * s2 + 84.0) / 3.0) / ((56.0 * s2 + 84.0) / 3.0)});
    out.push_back(make_certificate("quartic_vieta", "roots x1..x4", -err, 0.0, 0.0, 1e-10));
    auto c = make_certificate("quartic_roots_above_one", "roots x1..x4", x[0] - 1.0, x[0] * M, 0.0, 0.0, true);
    out.push_back(c);
    out.push_back(make_certificate("r_e_below_x1", "r = r_e", (x[0] * M - ms.r_e()) / M, ms.r_e(), 0.0, 0.0, true));
  }
  {
    MinTracker ode;
    for (double r : nodes) {
      const double y = eval_y0(p, r), yp = eval_y0_prime(p, r);
      const double res = yp + 2.0 / r * y - 0.25 * sigma(p, r) * y * y;
      ode.offer(-std::abs(res) / std::abs(yp), r);
    }
    out.push_back(make_certificate("hardy_ode_y0", gdesc + " (relative to |y0'|)", ode.value, ode.r, 0.0, kClosedFormTol));
  }
  const Grid2D g2 = default_grid2d(p, opt.grid2d_r, opt.grid2d_theta);
  out.push_back(certify_hardy(ms, g2));
  out.push_back(make_certificate("c1_positive", "r in [r_e, r_*]", ms.c1(), ms.r_e(), 0.0, 0.0, true));
  {
    const auto m = delta_T_margin(ms, ms.delta_T());
    auto c = make_certificate("delta_T_feasible", "log grid (M, 1e4 M], 1e4 points + r_e + roots", m.min_margin, m.argmin,
                              0.0, kClosedFormTol);
    c.note = "delta_T = " + fmt(ms.delta_T());
    out.push_back(c);
  }
  for (auto& c : certify_combined(ms, g2)) out.push_back(std::move(c));

  // div_levels < 2 skips the divergence identity
  if (opt.div_levels >= 2)
  for (const auto& f : manufactured_catalog(M)) {
    const auto s = divergence_study(ms, f, opt.div_h0, opt.div_levels);
    const std::string desc = "box r in [1.5M, 10M], theta in [0.2, pi-0.2], h0 = " + fmt(opt.div_h0) + "M, " +
                             std::to_string(opt.div_levels) + " levels";
    auto c = make_certificate("divergence_order_" + f.name, desc, opt.div_order_tol - std::abs(s.slope - 4.0), 0.0,
                              0.0, 0.0);
    c.note = "slope " + fmt(s.slope);
    out.push_back(c);
    auto d = make_certificate("divergence_residual_" + f.name, desc, opt.div_abs_tol - s.residual.back(), 0.0, 0.0,
                              0.0);
    d.note = "finest residual " + fmt(s.residual.back());
    out.push_back(d);
  }
  return rep;
}

}  // namespace morawetz
