#include "morawetz/config.hpp"

#include <cstdint>
#include <cstdio>
#include <set>
#include <sstream>

namespace morawetz {

using nlohmann::json;
using nlohmann::ordered_json;

std::string to_string(Mode m) {
  switch (m) {
    case Mode::coeffs: return "coeffs";
    case Mode::certify: return "certify";
    case Mode::divcheck: return "divcheck";
    case Mode::evolve: return "evolve";
  }
  return "?";
}

Mode mode_from_string(const std::string& s) {
  if (s == "coeffs") return Mode::coeffs;
  if (s == "certify") return Mode::certify;
  if (s == "divcheck") return Mode::divcheck;
  if (s == "evolve") return Mode::evolve;
  throw ConfigError("unknown mode '" + s + "'");
}

namespace {

class Reader {
 public:
  std::vector<std::string> errors;

  // Returns the sub-object at key (or null) after checking its keys.
  const json* section(const json& parent, const std::string& key, const std::string& path,
                      const std::set<std::string>& allowed) {
    auto it = parent.find(key);
    if (it == parent.end()) return nullptr;
    if (!it->is_object()) {
      errors.push_back(path + ": expected an object");
      return nullptr;
    }
    keys(*it, path, allowed);
    return &*it;
  }

  void keys(const json& obj, const std::string& prefix, const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
      if (!allowed.count(it.key())) errors.push_back(join(prefix, it.key()) + ": unknown key");
  }

  void number(const json* obj, const std::string& prefix, const char* key, double& dst) {
    if (!obj) return;
    auto it = obj->find(key);
    if (it == obj->end()) return;
    if (!it->is_number()) {
      errors.push_back(join(prefix, key) + ": expected a number");
      return;
    }
    dst = it->get<double>();
  }

  void integer(const json* obj, const std::string& prefix, const char* key, int& dst) {
    if (!obj) return;
    auto it = obj->find(key);
    if (it == obj->end()) return;
    if (!it->is_number_integer()) {
      errors.push_back(join(prefix, key) + ": expected an integer");
      return;
    }
    dst = it->get<int>();
  }

  void size(const json* obj, const std::string& prefix, const char* key, std::size_t& dst) {
    int v = static_cast<int>(dst);
    integer(obj, prefix, key, v);
    if (v < 1) errors.push_back(join(prefix, key) + ": must be positive");
    else dst = static_cast<std::size_t>(v);
  }

  void boolean(const json* obj, const std::string& prefix, const char* key, bool& dst) {
    if (!obj) return;
    auto it = obj->find(key);
    if (it == obj->end()) return;
    if (!it->is_boolean()) {
      errors.push_back(join(prefix, key) + ": expected a boolean");
      return;
    }
    dst = it->get<bool>();
  }

  void string(const json* obj, const std::string& prefix, const char* key, std::string& dst) {
    if (!obj) return;
    auto it = obj->find(key);
    if (it == obj->end()) return;
    if (!it->is_string()) {
      errors.push_back(join(prefix, key) + ": expected a string");
      return;
    }
    dst = it->get<std::string>();
  }

  void check(bool ok, const std::string& msg) {
    if (!ok) errors.push_back(msg);
  }

  static std::string join(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
  }
};

}  // namespace

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  return parse_config(j);
}

RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c;
  Reader rd;
  rd.keys(j, "", {"mode", "M", "grid", "cfl", "t_end", "output_every", "data", "multiplier", "diagnostics", "coeffs",
                  "certify", "divcheck", "sabotage", "out"});

  std::string mode = to_string(c.mode);
  rd.string(&j, "", "mode", mode);
  try {
    c.mode = mode_from_string(mode);
  } catch (const ConfigError& e) {
    rd.errors.push_back(std::string("mode: ") + e.what());
  }
  rd.number(&j, "", "M", c.params.M);
  rd.check(c.params.M > 0.0, "M must be positive");
  rd.string(&j, "", "out", c.out);

  auto& g = c.evolve.grid;
  const json* grid = rd.section(j, "grid", "grid", {"rstar_min", "rstar_max", "nr", "ntheta", "boundary"});
  rd.number(grid, "grid", "rstar_min", g.rstar_min);
  rd.number(grid, "grid", "rstar_max", g.rstar_max);
  rd.integer(grid, "grid", "nr", g.nr);
  rd.integer(grid, "grid", "ntheta", g.ntheta);
  std::string boundary = to_string(g.boundary);
  rd.string(grid, "grid", "boundary", boundary);
  try {
    g.boundary = boundary_from_string(boundary);
  } catch (const ConfigError& e) {
    rd.errors.push_back(e.what());
  }
  rd.check(g.rstar_min < g.rstar_max, "grid.rstar_min must be below grid.rstar_max");
  rd.check(g.nr >= 16, "grid.nr must be at least 16");
  rd.check(g.ntheta >= 8, "grid.ntheta must be at least 8");

  rd.number(&j, "", "cfl", c.evolve.cfl);
  rd.number(&j, "", "t_end", c.evolve.t_end);
  rd.number(&j, "", "output_every", c.evolve.output_every);
  rd.check(c.evolve.cfl > 0.0 && c.evolve.cfl <= 1.0, "cfl must lie in (0, 1]");
  rd.check(c.evolve.t_end >= 0.0, "t_end must be >= 0");
  rd.check(c.evolve.output_every > 0.0, "output_every must be positive");

  auto& d = c.evolve.data;
  const json* data = rd.section(j, "data", "data", {"A", "r0star", "sigma", "ell"});
  rd.number(data, "data", "A", d.A);
  rd.number(data, "data", "r0star", d.r0star);
  rd.number(data, "data", "sigma", d.sigma);
  rd.integer(data, "data", "ell", d.ell);
  rd.check(d.sigma > 0.0, "data.sigma must be positive");
  rd.check(d.ell >= 0, "data.ell must be >= 0");

  auto& m = c.multiplier;
  const json* mult = rd.section(j, "multiplier", "multiplier",
                                {"r_e", "eta", "delta_T", "j_profile", "outer_cutoff", "transport"});
  rd.number(mult, "multiplier", "r_e", m.r_e);
  rd.number(mult, "multiplier", "eta", m.eta);
  rd.number(mult, "multiplier", "delta_T", m.delta_T);
  rd.number(mult, "multiplier", "outer_cutoff", m.outer_cutoff);
  std::string prof = to_string(m.profile);
  rd.string(mult, "multiplier", "j_profile", prof);
  try {
    m.profile = j_profile_from_string(prof);
  } catch (const std::invalid_argument& e) {
    rd.errors.push_back(std::string("multiplier.j_profile: ") + e.what());
  }
  if (mult) {
    const json* tr = rd.section(*mult, "transport", "multiplier.transport", {"amplitude", "rise", "falloff", "power"});
    rd.number(tr, "multiplier.transport", "amplitude", m.transport.amplitude);
    rd.number(tr, "multiplier.transport", "rise", m.transport.rise);
    rd.number(tr, "multiplier.transport", "falloff", m.transport.falloff);
    rd.number(tr, "multiplier.transport", "power", m.transport.power);
  }
  rd.check(m.r_e > c.params.M, "r_e must exceed M");
  rd.check(m.r_e < r_star_pt(c.params), "r_e must be below r_* = (2+sqrt(3))M");
  rd.check(m.eta > 0.0 && m.eta < 1.0, "multiplier.eta must lie in (0, 1)");
  rd.check(m.delta_T >= 0.0, "multiplier.delta_T must be >= 0 (0 selects the search)");
  rd.check(m.outer_cutoff > 1.0, "multiplier.outer_cutoff must exceed 1");
  rd.check(m.transport.amplitude >= 0.0 && m.transport.rise > 0.0 && m.transport.falloff > 0.0 &&
               m.transport.power > 0.0,
           "multiplier.transport parameters out of range");

  const json* sab = rd.section(j, "sabotage", "sabotage", {"flip_C1", "bound_scale"});
  rd.boolean(sab, "sabotage", "flip_C1", m.sabotage.flip_C1);
  rd.number(sab, "sabotage", "bound_scale", m.sabotage.bound_scale);

  auto& b = c.evolve.bulk;
  const json* diag = rd.section(j, "diagnostics", "diagnostics", {"R_e", "trap_window"});
  rd.number(diag, "diagnostics", "R_e", b.R_e);
  rd.number(diag, "diagnostics", "trap_window", b.trap_window);
  b.r_e = m.r_e;
  rd.check(b.R_e > m.r_e, "diagnostics.R_e must exceed r_e");
  rd.check(b.trap_window > 0.0, "diagnostics.trap_window must be positive");

  const json* co = rd.section(j, "coeffs", "coeffs", {"r_min", "r_max", "count"});
  rd.number(co, "coeffs", "r_min", c.coeffs.r_min);
  rd.number(co, "coeffs", "r_max", c.coeffs.r_max);
  rd.integer(co, "coeffs", "count", c.coeffs.count);
  rd.check(c.coeffs.r_min > 1.0, "coeffs.r_min must exceed 1 (units of M)");
  rd.check(c.coeffs.r_max > c.coeffs.r_min, "coeffs.r_max must exceed coeffs.r_min");
  rd.check(c.coeffs.count >= 1, "coeffs.count must be positive");

  const json* ce = rd.section(j, "certify", "certify", {"radial_points", "grid2d_r", "grid2d_theta"});
  rd.size(ce, "certify", "radial_points", c.certify.radial_points);
  rd.size(ce, "certify", "grid2d_r", c.certify.grid2d_r);
  rd.size(ce, "certify", "grid2d_theta", c.certify.grid2d_theta);

  const json* dv = rd.section(j, "divcheck", "divcheck", {"h0", "levels", "order_tol", "abs_tol"});
  rd.number(dv, "divcheck", "h0", c.divcheck.h0);
  rd.integer(dv, "divcheck", "levels", c.divcheck.levels);
  rd.number(dv, "divcheck", "order_tol", c.divcheck.order_tol);
  rd.number(dv, "divcheck", "abs_tol", c.divcheck.abs_tol);
  rd.check(c.divcheck.h0 > 0.0 && c.divcheck.h0 <= 0.2, "divcheck.h0 must lie in (0, 0.2]");
  rd.check(c.divcheck.levels >= 2, "divcheck.levels must be at least 2");
  c.certify.div_h0 = c.divcheck.h0;
  c.certify.div_levels = c.divcheck.levels;
  c.certify.div_order_tol = c.divcheck.order_tol;
  c.certify.div_abs_tol = c.divcheck.abs_tol;

  if (!rd.errors.empty()) {
    std::string msg;
    for (const auto& e : rd.errors) msg += (msg.empty() ? "" : "; ") + e;
    throw ConfigError(msg);
  }
  return c;
}

ordered_json serialize(const RunConfig& c) {
  const auto& g = c.evolve.grid;
  const auto& d = c.evolve.data;
  const auto& m = c.multiplier;
  ordered_json j;
  j["mode"] = to_string(c.mode);
  j["M"] = c.params.M;
  j["grid"] = {{"rstar_min", g.rstar_min}, {"rstar_max", g.rstar_max}, {"nr", g.nr}, {"ntheta", g.ntheta},
               {"boundary", to_string(g.boundary)}};
  j["cfl"] = c.evolve.cfl;
  j["t_end"] = c.evolve.t_end;
  j["output_every"] = c.evolve.output_every;
  j["data"] = {{"A", d.A}, {"r0star", d.r0star}, {"sigma", d.sigma}, {"ell", d.ell}};
  j["multiplier"] = {{"r_e", m.r_e},
                     {"eta", m.eta},
                     {"delta_T", m.delta_T},
                     {"j_profile", to_string(m.profile)},
                     {"outer_cutoff", m.outer_cutoff},
                     {"transport",
                      {{"amplitude", m.transport.amplitude},
                       {"rise", m.transport.rise},
                       {"falloff", m.transport.falloff},
                       {"power", m.transport.power}}}};
  j["diagnostics"] = {{"R_e", c.evolve.bulk.R_e}, {"trap_window", c.evolve.bulk.trap_window}};
  j["coeffs"] = {{"r_min", c.coeffs.r_min}, {"r_max", c.coeffs.r_max}, {"count", c.coeffs.count}};
  j["certify"] = {{"radial_points", c.certify.radial_points},
                  {"grid2d_r", c.certify.grid2d_r},
                  {"grid2d_theta", c.certify.grid2d_theta}};
  j["divcheck"] = {{"h0", c.divcheck.h0},
                   {"levels", c.divcheck.levels},
                   {"order_tol", c.divcheck.order_tol},
                   {"abs_tol", c.divcheck.abs_tol}};
  j["sabotage"] = {{"flip_C1", m.sabotage.flip_C1}, {"bound_scale", m.sabotage.bound_scale}};
  j["out"] = c.out;
  return j;
}

void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + assignment + "'");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError("--set: empty path component in '" + path + "'");
    if (!node->is_object()) throw ConfigError("--set: '" + path + "' descends into a non-object");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

std::string config_hash(const RunConfig& c) {
  ordered_json j = serialize(c);
  j.erase("out");
  const std::string s = j.dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace morawetz
