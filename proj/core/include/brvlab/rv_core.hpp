#pragma once

#include <cstddef>
#include <span>

namespace brvlab {

/// One-parameter Pareto law: survival(y) = (sigma / y)^alpha above sigma and
/// 1 below. Every regular-variation statement about it is an exact identity
/// above the scale.
class RvMarginal {
 public:
  RvMarginal(double alpha, double sigma);

  double alpha() const noexcept { return alpha_; }
  double sigma() const noexcept { return sigma_; }

  /// P[V > y]. Total on the extended reals: 1 below sigma, 0 at +inf.
  double survival(double y) const noexcept;
  double cdf(double y) const noexcept { return 1.0 - survival(y); }

  /// Smallest y with survival(y) <= s, for s in (0, 1]; +inf for s == 0.
  double inverse_survival(double s) const;

  /// U(x): generalized inverse of 1 / survival. sigma * x^(1/alpha) for
  /// x >= 1, and sigma on (0, 1).
  double normalization(double x) const;

  /// E[V * 1{V > a}]; requires alpha > 1.
  double partial_expectation(double a) const;

  /// Draw from a survival level s in (0, 1].
  double from_survival_level(double s) const noexcept;

  friend bool operator==(const RvMarginal&, const RvMarginal&) = default;

 private:
  double alpha_;
  double sigma_;
};

struct MatuszewskaIndices {
  double lower;
  double upper;
};

MatuszewskaIndices matuszewska_indices(const RvMarginal& m) noexcept;

/// Hill estimator of the tail index from the top-k order statistics:
/// 1 / mean_{i<=k} log(X_(i) / X_(k+1)).
double hill_estimate(std::span<const double> samples, std::size_t k);

}  // namespace brvlab
