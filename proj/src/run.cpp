#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "morawetz/config.hpp"

namespace morawetz {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const RunConfig& c, const std::string& name) {
  fs::create_directories(c.out);
  const fs::path path = fs::path(c.out) / name;
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << std::setprecision(17);
  return os;
}

ordered_json header(const RunConfig& c, std::vector<std::string> columns) {
  return {{"columns", columns}, {"config_hash", config_hash(c)}, {"mode", to_string(c.mode)}};
}

ordered_json to_json(const Certificate& c) {
  return {{"name", c.name},         {"grid", c.grid},       {"min_margin", c.min_margin},
          {"argmin_r", c.argmin_r}, {"argmin_theta", c.argmin_theta}, {"tolerance", c.tolerance},
          {"passed", c.passed},     {"note", c.note}};
}

int run_coeffs(const RunConfig& c, ordered_json& summary) {
  const MultiplierSet ms = MultiplierSet::build(c.params, c.multiplier);
  const double M = c.params.M;
  auto os = open_output(c, "coeffs.csv");
  os << "# config_hash=" << config_hash(c) << " delta_T=" << ms.delta_T() << " j_profile=" << to_string(ms.profile())
     << "\n";
  os << "r,z,u,w,v,wT,A,V,boxwT,th_dr,th_dt,th_ang,th_psi\n";
  const auto rs = log_grid(M, c.coeffs.r_min * M, c.coeffs.r_max * M, static_cast<std::size_t>(c.coeffs.count));
  for (double r : rs) {
    const auto s = sample(ms, r);
    const auto th = theorem_coeffs(c.params, r);
    os << s.r << ',' << s.z << ',' << s.u << ',' << s.w << ',' << s.v << ',' << s.wT << ',' << s.A << ',' << s.V
       << ',' << s.boxwT << ',' << th.dr << ',' << th.dt << ',' << th.ang << ',' << th.psi << '\n';
  }
  summary["rows"] = rs.size();
  summary["C1"] = ms.C1();
  summary["C2"] = ms.C2();
  summary["c0"] = ms.c0();
  summary["c1"] = ms.c1();
  summary["delta_T"] = ms.delta_T();
  summary["r_trap"] = ms.r_trap();
  summary["r_star"] = ms.r_star();
  summary["file"] = (fs::path(c.out) / "coeffs.csv").string();
  return 0;
}

int run_certify(const RunConfig& c, ordered_json& summary) {
  Report rep;
  try {
    const MultiplierSet ms = MultiplierSet::build(c.params, c.multiplier);
    rep = certify_all(ms, c.certify);
  } catch (const DeltaTError& e) {
    auto cert = make_certificate("delta_T_feasible", "dyadic delta_T search", -1.0, c.multiplier.r_e, 0.0, 0.0, true);
    cert.note = e.what();
    rep.certificates.push_back(cert);
  }
  ordered_json doc;
  doc["header"] = header(c, {"name", "grid", "min_margin", "argmin_r", "argmin_theta", "tolerance", "passed", "note"});
  doc["certificates"] = ordered_json::array();
  for (const auto& cert : rep.certificates) doc["certificates"].push_back(to_json(cert));
  auto os = open_output(c, "certificates.json");
  os << doc.dump(2) << '\n';

  summary["certificates"] = rep.certificates.size();
  ordered_json failed = ordered_json::array();
  for (const auto* f : rep.failures()) failed.push_back(f->name);
  summary["failed"] = failed;
  summary["file"] = (fs::path(c.out) / "certificates.json").string();
  return rep.passed() ? 0 : 1;
}

int run_divcheck(const RunConfig& c, ordered_json& summary) {
  const MultiplierSet ms = MultiplierSet::build(c.params, c.multiplier);
  auto os = open_output(c, "divcheck.csv");
  os << "# config_hash=" << config_hash(c) << "\n";
  os << "field,h,residual\n";
  bool ok = true;
  ordered_json fields = ordered_json::array();
  for (const auto& f : manufactured_catalog(c.params.M)) {
    const auto s = divergence_study(ms, f, c.divcheck.h0, c.divcheck.levels);
    for (std::size_t k = 0; k < s.h.size(); ++k) os << f.name << ',' << s.h[k] << ',' << s.residual[k] << '\n';
    const bool pass = std::abs(s.slope - 4.0) <= c.divcheck.order_tol && s.residual.back() <= c.divcheck.abs_tol;
    ok = ok && pass;
    fields.push_back({{"field", f.name}, {"slope", s.slope}, {"finest_residual", s.residual.back()}, {"passed", pass}});
  }
  summary["fields"] = fields;
  summary["file"] = (fs::path(c.out) / "divcheck.csv").string();
  return ok ? 0 : 1;
}

int run_evolve(const RunConfig& c, ordered_json& summary) {
  EvolveConfig ec = c.evolve;
  ec.bulk.r_e = c.multiplier.r_e;
  const EvolveResult res = evolve(c.params, ec);
  const auto& s = res.series;
  {
    auto os = open_output(c, "timeseries.csv");
    os << "# config_hash=" << config_hash(c) << "\n";
    os << "t,E_T,flux_in,flux_out,B_cum,C_est_running\n";
    double running = 0.0;
    for (std::size_t k = 0; k < s.times.size(); ++k) {
      if (s.E0 > 0.0) running = std::max(running, s.B[k] / s.E0);
      os << s.times[k] << ',' << s.E_T[k] << ',' << s.flux_in[k] << ',' << s.flux_out[k] << ',' << s.B[k] << ','
         << running << '\n';
    }
  }
  ordered_json js;
  js["header"] = header(c, {"E0", "E_final", "C_est", "corollary_const", "trap_const", "ebc", "dt", "steps"});
  js["E0"] = s.E0;
  js["E_final"] = s.E_T.empty() ? 0.0 : s.E_T.back();
  js["C_est"] = s.C_est;
  js["C_degenerate"] = !(s.E0 > 0.0);
  js["corollary_const"] = res.corollary_const;
  js["trap_const"] = res.trap_const;
  js["ebc"] = res.ebc;
  js["dt"] = res.dt;
  js["steps"] = res.steps;
  {
    auto os = open_output(c, "summary.json");
    os << js.dump(2) << '\n';
  }
  for (auto it = js.begin(); it != js.end(); ++it)
    if (it.key() != "header") summary[it.key()] = it.value();
  summary["file"] = (fs::path(c.out) / "timeseries.csv").string();
  return 0;
}

}  // namespace

int run(const RunConfig& c, std::ostream& out) {
  ordered_json summary;
  summary["mode"] = to_string(c.mode);
  summary["config_hash"] = config_hash(c);
  int code = 0;
  try {
    switch (c.mode) {
      case Mode::coeffs: code = run_coeffs(c, summary); break;
      case Mode::certify: code = run_certify(c, summary); break;
      case Mode::divcheck: code = run_divcheck(c, summary); break;
      case Mode::evolve: code = run_evolve(c, summary); break;
    }
    summary["status"] = code == 0 ? "ok" : "violation";
  } catch (const InstabilityError& e) {
    code = 1;
    summary["status"] = "unstable";
    summary["error"] = e.what();
  } catch (const DeltaTError& e) {
    code = 1;
    summary["status"] = "violation";
    summary["error"] = e.what();
  } catch (const ConfigError& e) {
    code = 2;
    summary["status"] = "usage";
    summary["error"] = e.what();
  } catch (const std::logic_error& e) {  // invalid_argument, domain_error from parameter checks
    code = 2;
    summary["status"] = "usage";
    summary["error"] = e.what();
  }
  out << summary.dump(2) << '\n';
  return code;
}

}  // namespace morawetz
