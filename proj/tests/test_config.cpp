#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "morawetz/config.hpp"

using namespace morawetz;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("morawetz_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string first_line(const fs::path& p) {
  std::ifstream is(p);
  std::string line;
  std::getline(is, line);
  return line;
}

}  // namespace

TEST_CASE("empty config gives defaults") {
  const RunConfig c = parse_config("{}");
  CHECK(c.mode == Mode::certify);
  CHECK(c.params.M == 1.0);
  CHECK(c.multiplier.r_e == 1.1);
  CHECK(c.multiplier.eta == 0.5);
  CHECK(c.evolve.grid.nr == 2048);
  CHECK(c.evolve.grid.ntheta == 48);
  CHECK(c.evolve.t_end == 200.0);
  CHECK(c.evolve.cfl == 0.4);
  CHECK(c.evolve.data.ell == 2);
  CHECK(c.out == ".");
}

TEST_CASE("validation errors name the key") {
  CHECK(error_of(R"({"multiplier":{"r_e":0.9}})").find("r_e must exceed M") != std::string::npos);
  CHECK(error_of(R"({"grid":{"nr":2}})").find("grid.nr") != std::string::npos);
  CHECK(error_of(R"({"grid":{"nrr":2}})").find("grid.nrr: unknown key") != std::string::npos);
  CHECK(error_of(R"({"colour":1})").find("colour: unknown key") != std::string::npos);
  CHECK(error_of(R"({"M":"one"})").find("M: expected a number") != std::string::npos);
  CHECK(error_of(R"({"mode":"plot"})").find("mode") != std::string::npos);
  CHECK(error_of(R"({"multiplier":{"j_profile":"x"}})").find("j_profile") != std::string::npos);
  CHECK(error_of("{not json").find("malformed JSON") != std::string::npos);
  CHECK(error_of("[1,2]").find("object") != std::string::npos);
  // every problem is reported at once
  const auto both = error_of(R"({"M":-1,"cfl":3})");
  CHECK(both.find("M must be positive") != std::string::npos);
  CHECK(both.find("cfl") != std::string::npos);
}

TEST_CASE("serialize round trip") {
  const std::string text = R"({
    "mode": "evolve", "M": 1.5,
    "grid": {"rstar_min": -60, "rstar_max": 120, "nr": 512, "ntheta": 16, "boundary": "dirichlet"},
    "cfl": 0.3, "t_end": 40, "output_every": 2,
    "data": {"A": 0.5, "r0star": 12, "sigma": 2.5, "ell": 0},
    "multiplier": {"r_e": 1.7, "eta": 0.4, "delta_T": 2, "j_profile": "hardy_taper", "outer_cutoff": 2.5,
                   "transport": {"amplitude": 0.02, "rise": 0.3, "falloff": 6, "power": 8}},
    "diagnostics": {"R_e": 12, "trap_window": 0.25},
    "coeffs": {"r_min": 1.01, "r_max": 50, "count": 10},
    "certify": {"radial_points": 1000, "grid2d_r": 100, "grid2d_theta": 5},
    "divcheck": {"h0": 0.05, "levels": 3, "order_tol": 0.3, "abs_tol": 1e-5},
    "sabotage": {"flip_C1": true, "bound_scale": 1.01},
    "out": "results"
  })";
  const RunConfig c = parse_config(text);
  CHECK(c.mode == Mode::evolve);
  CHECK(c.evolve.grid.boundary == Boundary::dirichlet);
  CHECK(c.evolve.bulk.r_e == 1.7);
  CHECK(c.certify.div_levels == 3);
  const auto once = serialize(c);
  const auto twice = serialize(parse_config(json::parse(once.dump())));
  CHECK(once == twice);
  CHECK(once["multiplier"]["transport"]["power"] == 8.0);
}

TEST_CASE("overrides") {
  json j = json::object();
  apply_override(j, "grid.nr=1024");
  apply_override(j, "multiplier.j_profile=hardy_taper");
  apply_override(j, "sabotage.flip_C1=true");
  apply_override(j, "out=some/dir");
  CHECK(j["grid"]["nr"] == 1024);
  CHECK(j["multiplier"]["j_profile"] == "hardy_taper");
  CHECK(j["sabotage"]["flip_C1"] == true);
  const RunConfig c = parse_config(j);
  CHECK(c.evolve.grid.nr == 1024);
  CHECK(c.multiplier.profile == JProfile::hardy_taper);
  CHECK(c.out == "some/dir");
  CHECK_THROWS_AS(apply_override(j, "novalue"), ConfigError);
  CHECK_THROWS_AS(apply_override(j, "=3"), ConfigError);
  CHECK_THROWS_AS(apply_override(j, "grid.nr.x=3"), ConfigError);
}

TEST_CASE("config hash ignores the output directory only") {
  RunConfig a = parse_config("{}");
  RunConfig b = a;
  b.out = "elsewhere";
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  b.multiplier.eta = 0.4;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("mode strings") {
  for (Mode m : {Mode::coeffs, Mode::certify, Mode::divcheck, Mode::evolve}) CHECK(mode_from_string(to_string(m)) == m);
  CHECK_THROWS_AS(mode_from_string("x"), ConfigError);
}

TEST_CASE("run: coeffs writes a headed, deterministic table") {
  const auto dir = scratch("coeffs");
  RunConfig c = parse_config(R"({"mode":"coeffs","coeffs":{"count":50}})");
  c.out = dir.string();
  std::ostringstream s1, s2;
  CHECK(run(c, s1) == 0);
  std::ifstream is(dir / "coeffs.csv");
  std::stringstream first;
  first << is.rdbuf();
  CHECK(run(c, s2) == 0);
  std::ifstream is2(dir / "coeffs.csv");
  std::stringstream second;
  second << is2.rdbuf();
  CHECK(first.str() == second.str());
  CHECK(first_line(dir / "coeffs.csv").find("config_hash=" + config_hash(c)) != std::string::npos);
  CHECK(first.str().find("r,z,u,w,v,wT,A,V,boxwT,th_dr,th_dt,th_ang,th_psi\n") != std::string::npos);
  const auto summary = json::parse(s1.str());
  CHECK(summary["status"] == "ok");
  CHECK(summary["rows"] == 50);
  fs::remove_all(dir);
}

TEST_CASE("run: certify exit codes") {
  const auto dir = scratch("certify");
  RunConfig c = parse_config(
      R"({"certify":{"radial_points":5000,"grid2d_r":500,"grid2d_theta":6},"divcheck":{"levels":3,"abs_tol":1e-5}})");
  c.out = dir.string();
  std::ostringstream out;
  CHECK(run(c, out) == 0);
  const auto doc = json::parse(std::ifstream(dir / "certificates.json"));
  CHECK(doc["header"]["config_hash"] == config_hash(c));
  CHECK(doc["certificates"].size() > 20);

  c.multiplier.r_e = 1.5;
  std::ostringstream bad;
  CHECK(run(c, bad) == 1);
  CHECK(json::parse(bad.str())["failed"][0] == "delta_T_feasible");

  c.multiplier.r_e = 1.1;
  c.multiplier.sabotage.bound_scale = 1.01;
  std::ostringstream sab;
  CHECK(run(c, sab) == 1);
  fs::remove_all(dir);
}

TEST_CASE("run: evolve artifacts and usage errors") {
  const auto dir = scratch("evolve");
  RunConfig c = parse_config(R"({"mode":"evolve","t_end":4,"grid":{"nr":128,"ntheta":8,"rstar_min":-20,"rstar_max":40}})");
  c.out = dir.string();
  std::ostringstream out;
  CHECK(run(c, out) == 0);
  CHECK(first_line(dir / "timeseries.csv") == "# config_hash=" + config_hash(c));
  const auto summary = json::parse(std::ifstream(dir / "summary.json"));
  for (const char* k : {"E0", "C_est", "corollary_const", "ebc"}) CHECK(summary.contains(k));
  CHECK(summary["header"]["config_hash"] == config_hash(c));

  c.evolve.grid.nr = 2;  // bypasses parse-time validation
  std::ostringstream bad;
  CHECK(run(c, bad) == 2);
  CHECK(json::parse(bad.str())["status"] == "usage");
  fs::remove_all(dir);
}
