#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "brvlab/dep_families.hpp"
#include "brvlab/limit_measure.hpp"
#include "brvlab/mc_engine.hpp"

namespace brvlab {

/// Net loss per period: Pareto claim minus a constant premium, per line.
struct NetLossModel {
  double premium_x = 0.0;
  double premium_y = 0.0;

  PathModel path_model(bool positive_part = false) const {
    return {premium_x, premium_y, positive_part};
  }
};

enum class RuinKind { and_ruin, sim_ruin, or_ruin };

const char* to_string(RuinKind k) noexcept;

struct RuinIndicators {
  bool and_ruin = false;
  bool sim_ruin = false;
  bool or_ruin = false;
  bool first_ruin = false;
  bool second_ruin = false;
};

/// Per-path ruin indicators for capital x split as (p x, q x).
std::vector<RuinIndicators> simulate_paths(const NetLossModel& model, const FamilySequence& seq,
                                           double x, double p, double q, std::size_t n_paths,
                                           std::uint64_t seed);

struct RuinResult {
  RuinKind kind = RuinKind::and_ruin;
  Estimate estimate;
  double capital = 0.0;
  double p = 0.0;
  double q = 0.0;
  std::size_t horizon = 0;
};

RuinResult estimate_psi(RuinKind kind, const NetLossModel& model, const FamilySequence& seq,
                        double x, double p, double q, const McOptions& opts);

/// All ruin probabilities on shared paths. `or_by_parts` is first + second - and,
/// which matches `or_ruin` sample by sample.
struct RuinEstimates {
  Estimate and_ruin;
  Estimate sim_ruin;
  Estimate or_ruin;
  Estimate first;
  Estimate second;
  Estimate or_by_parts;
  Estimate and_over_sim;
};

RuinEstimates estimate_ruin(const NetLossModel& model, const FamilySequence& seq, double x,
                            double p, double q, const McOptions& opts);

/// P[S_n > p x, T_n > q x] / P[S_n^+ > p x, T_n^+ > q x] on common paths.
Estimate positive_part_gap(const NetLossModel& model, const FamilySequence& seq, double x,
                           double p, double q, const McOptions& opts);

/// One draw of (S_N, T_N) with N on its own substream.
std::pair<double, double> sample_stopped_sums(const DependenceFamily& fam,
                                              const StoppingLaw& stopping, const StreamSpec& spec);

SumTailEstimates estimate_stopped_sum_tails(const DependenceFamily& fam,
                                            const StoppingLaw& stopping, double p, double q,
                                            double x, const McOptions& opts);

struct JesEstimate {
  Estimate factor;             // E[Theta X | joint exceedance] / U_F(x)
  Estimate independent_share;  // share of the conditioning event from the independent branch
};

/// Joint expected shortfall of Theta X at thresholds (U_F(x), U_G(x)).
JesEstimate jes_empirical(const DependenceFamily& fam, double x, const McOptions& opts);

}  // namespace brvlab
