#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "morawetz/certifier.hpp"
#include "morawetz/diagnostics.hpp"
#include "morawetz/errors.hpp"
#include "morawetz/multipliers.hpp"

namespace morawetz {

enum class Mode { coeffs, certify, divcheck, evolve };

std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

struct CoeffsOptions {  // radii in units of M
  double r_min = 1.001;
  double r_max = 100.0;
  int count = 1000;
};

struct DivcheckOptions {
  double h0 = 0.1;
  int levels = 4;
  double order_tol = 0.2;
  double abs_tol = 1e-6;
};

struct RunConfig {
  Mode mode = Mode::certify;
  Params params;
  MultiplierOptions multiplier;
  EvolveConfig evolve;  // evolve.bulk.r_e mirrors multiplier.r_e
  CoeffsOptions coeffs;
  CertifyOptions certify;
  DivcheckOptions divcheck;
  std::string out = ".";
};

// Validated config from JSON text; throws ConfigError listing every offending key.
RunConfig parse_config(const std::string& text);
RunConfig parse_config(const nlohmann::json& j);
inline RunConfig parse_config(const char* text) { return parse_config(std::string(text)); }
nlohmann::ordered_json serialize(const RunConfig& c);

// Sets a dotted path ("grid.nr") to a value parsed as JSON, or as a string if that fails.
void apply_override(nlohmann::json& j, const std::string& assignment);

// FNV-1a 64 of the serialized config without the output directory, as 16 hex digits.
std::string config_hash(const RunConfig& c);

// Runs the configured subcommand, writes artifacts under c.out and the JSON
// summary to `summary`. Returns 0 success, 1 violation or instability, 2 usage error.
int run(const RunConfig& c, std::ostream& summary);

}  // namespace morawetz
