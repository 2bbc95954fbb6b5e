#include "stam/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  namespace sc = stam::cli;
  CLI::App app{"Truncated-Fock-space simulator for modulated shortcut-to-adiabaticity experiments"};
  std::string experiment, config_path, out_dir = ".";
  std::optional<int> dim, pulses;
  bool allow_unconverged = false;
  std::string names;
  for (const auto& n : sc::experiment_names()) names += (names.empty() ? "" : ", ") + n;
  app.add_option("experiment", experiment, "One of: " + names)->required();
  app.add_option("--config", config_path, "Flat key = value configuration file")->required();
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--dim", dim, "Override the Fock dimension");
  app.add_option("--pulses", pulses, "Override the pulse count");
  app.add_flag("--allow-unconverged", allow_unconverged, "Do not fail on convergence checks");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sc::kUsageError;
  }

  sc::Config config;
  try {
    config = sc::Config::load(config_path);
  } catch (const sc::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return sc::kUsageError;
  }
  sc::RunOptions options;
  options.dim = dim;
  options.pulses = pulses;
  options.allow_unconverged = allow_unconverged;

  const sc::RunResult result = sc::run_experiment(experiment, config, options);
  if (!result.files.empty()) {
    try {
      sc::write_artifacts(result, out_dir);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return sc::kUsageError;
    }
  }
  if (!result.message.empty()) std::cerr << (result.exit_code == 0 ? "" : "error: ") << result.message << '\n';
  return result.exit_code;
}
