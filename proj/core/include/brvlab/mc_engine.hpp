#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "brvlab/dep_families.hpp"
#include "brvlab/limit_measure.hpp"
#include "brvlab/rng.hpp"
#include "brvlab/tail_events.hpp"

namespace brvlab {

inline constexpr std::size_t kMinReliableHits = 50;

struct Estimate {
  double point = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::size_t hits = 0;     // samples with a nonzero contribution
  bool degenerate = false;  // every contribution was zero
  std::string warning;

  static Estimate from(double point, double std_error, std::size_t n, std::size_t hits);
};

/// Pools estimates from disjoint substreams: n-weighted mean, combined
/// within-task variance. Deterministic in the input order.
Estimate merge(std::span<const Estimate> estimates);

/// Running means and co-moments of k quantities (Chan et al. pairwise update).
class MomentAccumulator {
 public:
  explicit MomentAccumulator(std::size_t k = 0);

  std::size_t dimension() const noexcept { return k_; }
  std::size_t count() const noexcept { return n_; }
  void add(std::span<const double> v);
  void merge(const MomentAccumulator& other);

  double mean(std::size_t i) const { return mean_[i]; }
  /// Unbiased sample covariance.
  double covariance(std::size_t i, std::size_t j) const;
  std::size_t hits(std::size_t i) const { return hits_[i]; }

  /// Estimate of scale * E[v_i].
  Estimate estimate(std::size_t i, double scale = 1.0) const;
  /// Delta-method estimate of E[v_i] / E[v_j].
  Estimate ratio(std::size_t i, std::size_t j, double scale = 1.0) const;
  /// scale * E[sum_i c_i v_i].
  Estimate linear(std::span<const double> coefficients, double scale = 1.0) const;

 private:
  std::size_t k_;
  std::size_t n_ = 0;
  std::vector<double> mean_;
  std::vector<double> comoment_;  // k x k
  std::vector<std::size_t> hits_;
  std::vector<double> scratch_;
};

enum class EstimatorKind {
  conditional,  // sum over indices of the conditional probability given the rest
  plain,        // raw indicator
};

struct McOptions {
  std::size_t samples = 100000;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::size_t block_size = 4096;
  EstimatorKind kind = EstimatorKind::conditional;
};

/// Runs `fn(stream, count, acc)` on fixed-size blocks; block b draws from
/// StreamSpec{seed, b}. Block accumulators are merged in block order, so the
/// result does not depend on the worker count.
using BlockFn = std::function<void(const StreamSpec&, std::size_t, MomentAccumulator&)>;
MomentAccumulator run_blocks(std::size_t dimension, const McOptions& opts, const BlockFn& fn);

/// Salts of the per-index substreams and of the stopping count.
inline std::uint64_t index_salt(std::size_t i) noexcept { return 1 + i; }
inline constexpr std::uint64_t kStoppingSalt = 0x5709u;

/// Where paths come from: a fixed sequence of n indices or an iid family
/// stopped at an independent count N.
struct PathSource {
  FamilySequence seq;
  std::optional<StoppingLaw> stopping;

  static PathSource fixed(FamilySequence seq) { return {std::move(seq), std::nullopt}; }
  static PathSource stopped(const DependenceFamily& fam, StoppingLaw n);
};

/// Per-index streams of one block; draws one path at a time.
class PathSampler {
 public:
  PathSampler(const PathSource& source, const StreamSpec& spec);
  void next(Path& path);

 private:
  const PathSource* source_;
  std::vector<RngStream> streams_;
  std::optional<RngStream> count_stream_;
};

struct EventQuery {
  PathEvent event = PathEvent::corner;
  double a = 0.0;
  double b = 0.0;
  PathModel model;
};

/// One accumulator column per query, evaluated on shared paths.
MomentAccumulator simulate_events(const PathSource& source, std::span<const EventQuery> queries,
                                  const McOptions& opts);

/// x P[Theta X > U_F(x) p, Delta Y > U_G(x) q]. The conditional kind integrates
/// the claims out exactly given the weights.
Estimate estimate_scaled_corner(const DependenceFamily& fam, double p, double q, double x,
                                const McOptions& opts);

/// x P[S_n > U_F(x) p, T_n > U_G(x) q].
Estimate estimate_scaled_sum_corner(const FamilySequence& seq, double p, double q, double x,
                                    const McOptions& opts);

enum class Side { first, second };

/// x P[S_n > U_F(x) m] (first) or x P[T_n > U_G(x) m] (second).
Estimate estimate_marginal_sum_tail(const FamilySequence& seq, Side side, double multiplier,
                                    double x, const McOptions& opts);

/// Scaled first, second, corner and box tails on shared paths, plus the
/// conditional frequency P[corner] / P[second].
struct SumTailEstimates {
  Estimate first;
  Estimate second;
  Estimate corner;
  Estimate box;
  Estimate corner_given_second;
};

SumTailEstimates estimate_sum_tails(const PathSource& source, double p, double q, double x,
                                    const McOptions& opts);

}  // namespace brvlab
