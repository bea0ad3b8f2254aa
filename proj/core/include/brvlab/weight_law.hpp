#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "brvlab/rng.hpp"

namespace brvlab {

/// Law of a non-negative random weight with support bounded above:
/// either uniform on [lo, hi] or a finite set of positive atoms.
class WeightLaw {
 public:
  enum class Kind { uniform, discrete };

  struct Atom {
    double value;
    double prob;
  };

  static WeightLaw uniform(double lo, double hi);
  static WeightLaw discrete(std::vector<Atom> atoms);
  static WeightLaw constant(double value) { return discrete({{value, 1.0}}); }

  Kind kind() const noexcept { return kind_; }
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }

  bool in_support(double t) const noexcept;
  /// Index of the atom equal to t (within 1e-12 relative), discrete only.
  std::optional<std::size_t> atom_index(double t) const noexcept;

  double cdf(double t) const noexcept;
  /// P[W < t] + P[W = t] / 2; equals cdf for the uniform kind. E[mid_cdf(W)] = 1/2.
  double mid_cdf(double t) const noexcept;
  /// Left-continuous quantile on [0, 1).
  double quantile(double u) const noexcept;

  double mean() const noexcept { return moment(1.0); }
  /// E[W^r], r >= 0.
  double moment(double r) const noexcept;

  double sample(RngStream& rng) const { return quantile(rng.uniform()); }

  /// E[f(W)]: exact summation for atoms, adaptive quadrature otherwise.
  /// Interior break points split the quadrature at kinks of f.
  double expect(const std::function<double(double)>& f,
                const std::vector<double>& breaks = {}) const;

  friend bool operator==(const WeightLaw&, const WeightLaw&) = default;

 private:
  WeightLaw() = default;

  Kind kind_ = Kind::uniform;
  double lo_ = 0.0;
  double hi_ = 0.0;
  std::vector<Atom> atoms_;
  std::vector<double> cumulative_;
};

enum class WeightCoupling { independent, comonotone };

/// delta = scale * theta^exponent; a kink locus of a two-weight integrand.
struct PowerCurve {
  double scale;
  double exponent;

  double delta_at(double theta) const;
  double theta_at(double delta) const;
  /// Sign of delta - delta_at(theta).
  double side(double theta, double delta) const { return delta - delta_at(theta); }
};

/// Joint law of (Theta, Delta).
class WeightPair {
 public:
  WeightPair(WeightLaw theta, WeightLaw delta,
             WeightCoupling coupling = WeightCoupling::independent);

  const WeightLaw& theta() const noexcept { return theta_; }
  const WeightLaw& delta() const noexcept { return delta_; }
  WeightCoupling coupling() const noexcept { return coupling_; }

  std::pair<double, double> sample(RngStream& rng) const;

  /// E[f(Theta, Delta)]. When `kink` is given the integration domain is split
  /// along that curve so each piece is smooth.
  double expect(const std::function<double(double, double)>& f,
                const std::optional<PowerCurve>& kink = std::nullopt) const;

  friend bool operator==(const WeightPair&, const WeightPair&) = default;

 private:
  double expect_comonotone(const std::function<double(double, double)>& f,
                           const std::optional<PowerCurve>& kink) const;

  WeightLaw theta_;
  WeightLaw delta_;
  WeightCoupling coupling_;
};

}  // namespace brvlab
