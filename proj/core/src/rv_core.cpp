#include "brvlab/rv_core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "brvlab/error.hpp"

namespace brvlab {

RvMarginal::RvMarginal(double alpha, double sigma) : alpha_(alpha), sigma_(sigma) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw DomainError("tail index alpha must be finite and > 0");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw DomainError("scale sigma must be finite and > 0");
  }
}

double RvMarginal::survival(double y) const noexcept {
  if (std::isnan(y)) return y;
  if (y <= sigma_) return 1.0;
  return std::pow(sigma_ / y, alpha_);
}

double RvMarginal::inverse_survival(double s) const {
  if (!(s >= 0.0) || s > 1.0) {
    throw DomainError("survival level must lie in [0, 1]");
  }
  if (s == 0.0) return std::numeric_limits<double>::infinity();
  return from_survival_level(s);
}

double RvMarginal::from_survival_level(double s) const noexcept {
  return sigma_ * std::pow(s, -1.0 / alpha_);
}

double RvMarginal::normalization(double x) const {
  if (!(x > 0.0)) {
    throw DomainError("normalization argument must be > 0");
  }
  if (x < 1.0) return sigma_;
  return sigma_ * std::pow(x, 1.0 / alpha_);
}

double RvMarginal::partial_expectation(double a) const {
  if (!(alpha_ > 1.0)) {
    throw AssumptionViolation("partial expectation requires alpha > 1");
  }
  const double m = std::max(a, sigma_);
  if (std::isinf(m)) return 0.0;
  return alpha_ / (alpha_ - 1.0) * std::pow(sigma_, alpha_) * std::pow(m, 1.0 - alpha_);
}

MatuszewskaIndices matuszewska_indices(const RvMarginal& m) noexcept {
  return {m.alpha(), m.alpha()};
}

double hill_estimate(std::span<const double> samples, std::size_t k) {
  if (k < 2 || k >= samples.size()) {
    throw DomainError("hill_estimate: k must satisfy 2 <= k < sample count");
  }
  if (std::any_of(samples.begin(), samples.end(), [](double v) { return !(v > 0.0); })) {
    throw DomainError("hill_estimate: samples must be positive");
  }
  std::vector<double> top(samples.begin(), samples.end());
  std::nth_element(top.begin(), top.begin() + static_cast<std::ptrdiff_t>(k), top.end(),
                   std::greater<>());
  const double threshold = top[k];
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += std::log(top[i] / threshold);
  if (!(sum > 0.0)) {
    throw NumericFailure("hill_estimate: top order statistics are tied");
  }
  return static_cast<double>(k) / sum;
}

}  // namespace brvlab
