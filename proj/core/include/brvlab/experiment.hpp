#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "brvlab/config.hpp"

namespace brvlab {

struct ResultRow {
  double x = 0.0;
  double empirical = 0.0;
  double std_error = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double asymptote = 0.0;
  double ratio = 0.0;  // empirical / asymptote; NaN when the asymptote is 0
  std::string warning;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  bool pass = true;
  std::vector<std::string> failures;
  std::string diagnostics_json = "{}";  // experiment-specific extras
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// results.csv and summary.json in `dir`.
void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& result,
                   const std::filesystem::path& dir);

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitAssumption = 3,
  kExitNumeric = 4,
  kExitTolerance = 5,
};

struct RunOverrides {
  std::optional<std::size_t> workers;
  std::optional<std::string> output;
  std::optional<std::string> seed;
};

/// Loads, runs and writes one experiment; maps failures to exit codes and
/// reports them on stderr.
int run_from_file(const std::filesystem::path& config_path, const RunOverrides& overrides);

}  // namespace brvlab
