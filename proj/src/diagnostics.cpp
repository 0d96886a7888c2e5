#include "morawetz/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace morawetz {

namespace {

constexpr double kPi = std::numbers::pi;

double radial_weight(const Grid<double>& g, Eigen::Index i) {
  return (i == 0 || i == g.nr - 1) ? 0.5 * g.drs : g.drs;
}

}  // namespace

Field2 d_rstar(const Grid<double>& g, const Field2& f) {
  Field2 d(g.nr, g.ntheta);
  const double i2h = 1.0 / (2.0 * g.drs);
  const Eigen::Index n = g.nr - 1;
  d.middleRows(1, n - 1) = (f.bottomRows(n - 1) - f.topRows(n - 1)) * i2h;
  d.row(0) = (-3.0 * f.row(0) + 4.0 * f.row(1) - f.row(2)) * i2h;
  d.row(n) = (3.0 * f.row(n) - 4.0 * f.row(n - 1) + f.row(n - 2)) * i2h;
  return d;
}

Field2 d_theta(const Grid<double>& g, const Field2& f) {
  Field2 d(g.nr, g.ntheta);
  const double i2h = 1.0 / (2.0 * g.dtheta);
  const Eigen::Index n = g.ntheta;
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index jm = j == 0 ? 0 : j - 1;
    const Eigen::Index jp = j == n - 1 ? n - 1 : j + 1;
    d.col(j) = (f.col(jp) - f.col(jm)) * i2h;
  }
  return d;
}

double energy_T(const Grid<double>& g, const FieldState<double>& s) {
  const Field2 pr = d_rstar(g, s.psi);
  const Field2 pt = d_theta(g, s.psi);
  double E = 0.0;
  for (Eigen::Index j = 0; j < g.ntheta; ++j) {
    double col = 0.0;
    for (Eigen::Index i = 0; i < g.nr; ++i) {
      const double ratio = g.delta(i) / g.sigma(i);
      const double e = ratio * g.W(i, j) * s.pi(i, j) * s.pi(i, j) + g.sigma(i) * pr(i, j) * pr(i, j) +
                       ratio * pt(i, j) * pt(i, j);
      col += radial_weight(g, i) * e;
    }
    E += col * g.sin_theta(j) * g.dtheta;
  }
  return kPi * E;
}

double energy_Z(const Grid<double>& g, const FieldState<double>& s, const Field2* dphi) {
  const double M = g.params.M;
  double E = 0.0;
  for (Eigen::Index j = 0; j < g.ntheta; ++j) {
    double col = 0.0;
    for (Eigen::Index i = 0; i < g.nr; ++i) {
      const double ph = dphi ? (*dphi)(i, j) : 0.0;
      const double ratio = g.delta(i) / g.sigma(i);
      // -T^t_phi sqrt|g| with g^{tt}, g^{t phi} of extremal Kerr, in dr* measure
      const double e = ratio * g.W(i, j) * s.pi(i, j) * ph + 2.0 * M * M * g.r(i) / g.sigma(i) * ph * ph;
      col += radial_weight(g, i) * e;
    }
    E += col * g.sin_theta(j) * g.dtheta;
  }
  return 2.0 * kPi * E;
}

BoundaryFlux boundary_flux(const Grid<double>& g, const FieldState<double>& s) {
  const Eigen::Index n = g.nr - 1;
  const double i2h = 1.0 / (2.0 * g.drs);
  double in = 0.0, out = 0.0;
  for (Eigen::Index j = 0; j < g.ntheta; ++j) {
    const double d0 = (-3.0 * s.psi(0, j) + 4.0 * s.psi(1, j) - s.psi(2, j)) * i2h;
    const double dn = (3.0 * s.psi(n, j) - 4.0 * s.psi(n - 1, j) + s.psi(n - 2, j)) * i2h;
    const double w = g.sin_theta(j) * g.dtheta;
    in += g.sigma(0) * d0 * s.pi(0, j) * w;
    out -= g.sigma(n) * dn * s.pi(n, j) * w;
  }
  return {2.0 * kPi * in, 2.0 * kPi * out};
}

BulkSlice morawetz_bulk(const Grid<double>& g, const FieldState<double>& s, const BulkOptions& opt) {
  const Params& p = g.params;
  const double M = p.M;
  const double rt = r_trap(p);
  const Field2 prs = d_rstar(g, s.psi);
  const Field2 pth = d_theta(g, s.psi);
  BulkSlice b;
  for (Eigen::Index i = 0; i < g.nr; ++i) {
    const double r = g.r(i);
    const double dr_drs = g.delta(i) / g.sigma(i);
    const double a = 1.0 - M / r, c = 1.0 - rt / r;
    const double r3 = r * r * r;
    const double w_dr = a * a / r3, w_tr = c * c / r3, w_psi = a * a / (r3 * r);
    const bool in_cor = r >= opt.r_e && r <= opt.R_e;
    const bool in_trap = std::abs(r - rt) <= opt.trap_window;
    const double wr = radial_weight(g, i) * dr_drs;
    for (Eigen::Index j = 0; j < g.ntheta; ++j) {
      const double ct = g.cos_theta(j);
      const double meas = 2.0 * kPi * (r * r + M * M * ct * ct) * g.sin_theta(j) * g.dtheta * wr;
      const double ps = s.psi(i, j), pt = s.pi(i, j), pq = pth(i, j), x = prs(i, j);
      const double psr = x / dr_drs;
      const double e_dr = w_dr * psr * psr * meas;
      const double e_dt = w_tr * pt * pt * meas;
      const double e_ang = w_tr * pq * pq * meas;
      const double e_psi = w_psi * ps * ps * meas;
      b.dr += e_dr;
      b.dt += e_dt;
      b.ang += e_ang;
      b.psi += e_psi;
      if (in_cor) {
        const double d = (r - rt) * (r - rt);
        b.corollary += (x * x + ps * ps + d * (pq * pq / (r * r) + pt * pt)) * meas;
      }
      if (in_trap) b.trap += e_dt + e_ang;
    }
  }
  b.total = b.dr + b.dt + b.ang + b.psi;
  return b;
}

void Accumulator::start(double t, const BulkSlice& b, const BoundaryFlux& f) {
  t_ = t;
  last_ = b;
  last_flux_ = f;
  B_ = cor_ = trap_ = fin_ = fout_ = 0.0;
}

void Accumulator::accumulate(double dt, const BulkSlice& b, const BoundaryFlux& f) {
  const double h = 0.5 * dt;
  B_ += h * (last_.total + b.total);
  cor_ += h * (last_.corollary + b.corollary);
  trap_ += h * (last_.trap + b.trap);
  fin_ += h * (last_flux_.inner + f.inner);
  fout_ += h * (last_flux_.outer + f.outer);
  last_ = b;
  last_flux_ = f;
  t_ += dt;
}

CEstimate estimate_C(const EnergySeries& s) {
  CEstimate c;
  if (s.E_T.empty() || !(s.E0 > 0.0)) {
    c.degenerate = true;
    return c;
  }
  for (double b : s.B) c.value = std::max(c.value, b / s.E0);
  return c;
}

HardyRatio hardy_discrete(const std::vector<double>& x, const std::vector<double>& f, double tol) {
  const std::size_t n = x.size();
  if (n < 3 || f.size() != n) throw std::invalid_argument("hardy_discrete: need >= 3 matching samples");
  std::vector<double> d(n);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double hm = x[i] - x[i - 1], hp = x[i + 1] - x[i];
    d[i] = (hm * hm * f[i + 1] - hp * hp * f[i - 1] + (hp * hp - hm * hm) * f[i]) / (hm * hp * (hm + hp));
  }
  d[0] = (f[1] - f[0]) / (x[1] - x[0]);
  d[n - 1] = (f[n - 1] - f[n - 2]) / (x[n - 1] - x[n - 2]);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = x[i + 1] - x[i];
    num += 0.5 * h * (f[i] * f[i] + f[i + 1] * f[i + 1]);
    den += 0.5 * h * (x[i] * x[i] * d[i] * d[i] + x[i + 1] * x[i + 1] * d[i + 1] * d[i + 1]);
  }
  HardyRatio h;
  h.ratio = den > 0.0 ? num / den : std::numeric_limits<double>::infinity();
  h.within_bound = h.ratio <= 4.0 * (1.0 + tol);
  return h;
}

EvolveResult evolve(const Params& p, const EvolveConfig& c, const SampleHook& hook) {
  const Grid<double> g = make_grid<double>(p, c.grid);
  return evolve(g, gaussian(g, c.data), c, hook);
}

EvolveResult evolve(const Grid<double>& g, FieldState<double> state, const EvolveConfig& c, const SampleHook& hook) {
  if (!(c.cfl > 0.0 && c.cfl <= 1.0)) throw ConfigError("cfl must lie in (0, 1]");
  if (!(c.t_end >= 0.0)) throw ConfigError("t_end must be >= 0");
  if (!(c.output_every > 0.0)) throw ConfigError("output_every must be positive");

  EvolveResult res;
  EnergySeries& ser = res.series;
  const double dt_max = cfl_dt(g, c.cfl);
  res.steps = c.t_end > 0.0 ? static_cast<long>(std::ceil(c.t_end / dt_max - 1e-12)) : 0;
  res.dt = res.steps > 0 ? c.t_end / static_cast<double>(res.steps) : 0.0;

  Accumulator acc;
  acc.start(state.t, morawetz_bulk(g, state, c.bulk), boundary_flux(g, state));
  ser.E0 = energy_T(g, state);

  auto record = [&]() {
    ser.times.push_back(state.t);
    ser.E_T.push_back(energy_T(g, state));
    ser.flux_in.push_back(acc.flux_in());
    ser.flux_out.push_back(acc.flux_out());
    ser.B.push_back(acc.B());
    ser.corollary.push_back(acc.corollary());
    ser.trap.push_back(acc.trap());
    if (hook) hook(g, state);
  };
  record();

  Stepper<double> stepper(g);
  double next_out = state.t + c.output_every;
  for (long n = 1; n <= res.steps; ++n) {
    stepper.step(state, res.dt);
    if (!state.psi.allFinite() || !state.pi.allFinite()) {
      std::ostringstream os;
      os << "non-finite field at t = " << state.t << " (step " << n << ")";
      throw InstabilityError(os.str());
    }
    acc.accumulate(res.dt, morawetz_bulk(g, state, c.bulk), boundary_flux(g, state));
    if (state.t >= next_out - 1e-9 * res.dt || n == res.steps) {
      record();
      while (next_out <= state.t + 1e-9 * res.dt) next_out += c.output_every;
    }
  }

  const CEstimate C = estimate_C(ser);
  ser.C_est = C.value;
  if (ser.E0 > 0.0) {
    res.corollary_const = acc.corollary() / ser.E0;
    res.trap_const = acc.trap() / ser.E0;
    double emax = 0.0;
    for (double e : ser.E_T) emax = std::max(emax, e);
    res.ebc = emax / ser.E0 - 1.0;
  }
  res.final_state = std::move(state);
  return res;
}

}  // namespace morawetz
