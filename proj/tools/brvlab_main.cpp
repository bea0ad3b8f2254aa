#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "brvlab/experiment.hpp"
#include "brvlab/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Heavy-tailed interdependence experiments"};
  app.set_version_flag("--version", std::string(brvlab::kVersion));
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  std::string config_path;
  std::optional<std::size_t> workers;
  std::optional<std::string> output;
  std::optional<std::string> seed;
  run->add_option("config", config_path, "Experiment config (YAML)")->required();
  run->add_option("--workers", workers, "Worker threads (results do not depend on it)")
      ->check(CLI::PositiveNumber);
  run->add_option("--output", output, "Output directory (overrides the config)");
  run->add_option("--seed", seed, "Master seed in hexadecimal (overrides the config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : brvlab::kExitConfig;
  }
  return brvlab::run_from_file(config_path, {workers, output, seed});
}
