#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "brvlab/dep_families.hpp"
#include "brvlab/limit_measure.hpp"
#include "brvlab/mc_engine.hpp"

namespace brvlab {

inline constexpr int kSchemaVersion = 1;

enum class ExperimentKind {
  breiman,
  product_corner,
  sum_measure,
  stopped_sum,
  ruin,
  jes,
  cr,
  verify_assumptions,
};

const char* to_string(ExperimentKind k) noexcept;

enum class Functional { first, second, corner, box };

const char* to_string(Functional f) noexcept;

struct WeightSpec {
  std::string kind = "uniform";  // uniform | discrete | constant
  double lo = 0.0;
  double hi = 1.0;
  double value = 1.0;
  std::vector<WeightLaw::Atom> atoms;

  WeightLaw build() const;
};

struct FamilySpec {
  Variant variant = Variant::independence;
  double alpha = 2.0;
  double sigma_x = 1.0;
  double beta = 2.0;
  double sigma_y = 1.0;
  WeightSpec theta;
  WeightSpec delta;
  WeightCoupling coupling = WeightCoupling::independent;
  double tail_weight = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
  MixingFunction mixing;

  DependenceFamily build() const;
};

struct RuinSpec {
  std::string kind = "and";             // and | sim | or
  std::string functional = "psi";       // psi | positive-part-gap
  std::string weights = "per-index";    // per-index | product (rejected)
  double premium_x = 0.0;
  double premium_y = 0.0;
};

struct ToleranceSpec {
  std::optional<double> relative = 0.1;
  std::optional<double> stderr_multiple;
  std::string rows = "last";  // last | all
};

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  ExperimentKind kind = ExperimentKind::breiman;
  std::uint64_t seed = 0;
  std::string output = "brvlab-out";
  std::size_t workers = 1;
  std::size_t budget = 100000;
  std::vector<double> x_grid{1e3};
  double p = 1.0;
  double q = 1.0;
  std::size_t horizon = 1;
  double epsilon = 1.0;
  EstimatorKind estimator = EstimatorKind::conditional;
  Functional functional = Functional::corner;
  FamilySpec family;
  std::vector<FamilySpec> per_index;  // empty: iid copies of `family`
  std::vector<StoppingLaw::Atom> stopping;
  RuinSpec ruin;
  ToleranceSpec tolerance;

  FamilySequence sequence() const;
  StoppingLaw stopping_law() const;
};

/// Parses and validates; throws ConfigError on schema problems and
/// AssumptionViolation on inputs outside the supported model class.
ExperimentConfig parse_config(const std::string& yaml_text);
ExperimentConfig load_config(const std::filesystem::path& path);

std::uint64_t parse_seed(const std::string& text);
std::string format_seed(std::uint64_t seed);

/// Resolved configuration as JSON text (keys sorted).
std::string config_to_json(const ExperimentConfig& cfg);

}  // namespace brvlab
