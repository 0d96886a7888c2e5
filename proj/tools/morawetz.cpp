#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "morawetz/config.hpp"

using nlohmann::json;

int main(int argc, char** argv) {
  CLI::App app{"Morawetz multipliers, certificates and evolutions on extremal Kerr"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::vector<std::string> sets;
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--set", sets, "override a config key, e.g. --set grid.nr=1024")->take_all();
  app.fallthrough();

  for (const char* name : {"coeffs", "certify", "divcheck", "evolve"}) app.add_subcommand(name);
  app.get_subcommand("coeffs")->description("tabulate multiplier coefficients to coeffs.csv");
  app.get_subcommand("certify")->description("run all positivity certificates to certificates.json");
  app.get_subcommand("divcheck")->description("divergence identity convergence study to divcheck.csv");
  app.get_subcommand("evolve")->description("evolve Gaussian data, write timeseries.csv and summary.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    json j = json::object();
    if (!config_path.empty()) {
      std::ifstream is(config_path);
      std::stringstream ss;
      ss << is.rdbuf();
      j = json::parse(ss.str(), nullptr, false);
      if (j.is_discarded()) throw morawetz::ConfigError("malformed JSON in " + config_path);
    }
    j["mode"] = app.get_subcommands().front()->get_name();
    if (!out_dir.empty()) j["out"] = out_dir;
    for (const auto& s : sets) morawetz::apply_override(j, s);
    const morawetz::RunConfig c = morawetz::parse_config(j);
    return morawetz::run(c, std::cout);
  } catch (const morawetz::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
