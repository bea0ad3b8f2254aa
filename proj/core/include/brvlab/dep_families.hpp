#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "brvlab/rng.hpp"
#include "brvlab/rv_core.hpp"
#include "brvlab/weight_law.hpp"

namespace brvlab {

enum class Variant {
  independence,   // A: weights independent of (X, Y); h1 = h2 = g = 1
  marginal_tilt,  // B: FGM coupling of Theta-X and Delta-Y
  joint_mixture,  // C: weight-driven comonotone/independent mixture
};

const char* to_string(Variant v) noexcept;

/// w(theta, delta) = base + theta_slope * theta + delta_slope * delta.
struct MixingFunction {
  double base = 0.5;
  double theta_slope = 0.0;
  double delta_slope = 0.0;

  double operator()(double theta, double delta) const noexcept {
    return base + theta_slope * theta + delta_slope * delta;
  }
  friend bool operator==(const MixingFunction&, const MixingFunction&) = default;
};

enum class Branch : std::uint8_t { independent = 0, comonotone = 1 };

struct MainDraw {
  double x;
  double y;
  Branch branch;
};

struct JointDraw {
  double x;
  double y;
  double theta;
  double delta;
  Branch branch;
};

/// A fully specified law of (X, Y, Theta, Delta) with closed-form factor
/// functions h1, h2, g and closed-form joint limit tail.
class DependenceFamily {
 public:
  /// Variant A. (X, Y) is a comonotone/independent mixture with constant weight
  /// `tail_weight` (0 gives independent marginals).
  static DependenceFamily independence(RvMarginal x, RvMarginal y, WeightPair weights,
                                       double tail_weight = 0.0);
  /// Variant B with FGM strengths a1, a2 in [-1, 1].
  static DependenceFamily marginal_tilt(RvMarginal x, RvMarginal y, WeightPair weights,
                                        double a1, double a2);
  /// Variant C. The mixing function must map the weight support into (0, 1].
  static DependenceFamily joint_mixture(RvMarginal x, RvMarginal y, WeightPair weights,
                                        MixingFunction mixing);

  Variant variant() const noexcept { return variant_; }
  const RvMarginal& marginal_x() const noexcept { return x_; }
  const RvMarginal& marginal_y() const noexcept { return y_; }
  const WeightPair& weights() const noexcept { return weights_; }
  double a1() const noexcept { return a1_; }
  double a2() const noexcept { return a2_; }
  const MixingFunction& mixing() const noexcept { return mixing_; }

  double h1(double theta) const;
  double h2(double delta) const;
  double g(double theta, double delta) const;

  double h1_bound() const noexcept { return 1.0 + std::abs(a1_); }
  double h2_bound() const noexcept { return 1.0 + std::abs(a2_); }
  double g_bound() const noexcept;

  /// Weight of min(x^-alpha, y^-beta) in the joint limit tail of (X, Y).
  double tail_weight() const noexcept { return tail_weight_; }

  /// Probability of the comonotone branch given the weights.
  double mixing_weight(double theta, double delta) const noexcept;

  /// E[Theta^r h1(Theta)] and E[Delta^r h2(Delta)].
  double tilted_moment_x(double r) const;
  double tilted_moment_y(double r) const;

  /// P[X > a | Theta = theta], with a on the extended real line.
  double conditional_survival_x(double theta, double a) const noexcept;
  double conditional_survival_y(double delta, double b) const noexcept;
  /// P[X > a, Y > b | Theta = theta, Delta = delta].
  double conditional_joint_survival(double theta, double delta, double a, double b) const noexcept;
  /// E[X 1{X > a, Y > b} | Theta = theta, Delta = delta]; needs alpha > 1.
  double conditional_upper_moment_x(double theta, double delta, double a, double b) const;

  MainDraw sample_given(double theta, double delta, RngStream& rng) const;
  JointDraw sample(RngStream& rng) const;

 private:
  DependenceFamily(Variant v, RvMarginal x, RvMarginal y, WeightPair w);

  double tilt_x(double theta) const noexcept;  // FGM coefficient c = a1 (1 - 2 B(theta))
  double tilt_y(double delta) const noexcept;
  void require_theta(double theta) const;
  void require_delta(double delta) const;

  Variant variant_;
  RvMarginal x_;
  RvMarginal y_;
  WeightPair weights_;
  double a1_ = 0.0;
  double a2_ = 0.0;
  MixingFunction mixing_{0.0, 0.0, 0.0};
  double tail_weight_ = 0.0;
  double g_normalizer_ = 1.0;  // E[h1 h2] (B) or E[w] (C)
  double mixing_max_ = 0.0;
};

/// Per-index families for weighted sums. All indices share the marginals of
/// X and Y; factor functions and mixing may differ by index.
class FamilySequence {
 public:
  explicit FamilySequence(std::vector<DependenceFamily> families);
  static FamilySequence iid(const DependenceFamily& family, std::size_t n);

  std::size_t size() const noexcept { return families_.size(); }
  const DependenceFamily& operator[](std::size_t i) const { return families_[i]; }
  const DependenceFamily& front() const { return families_.front(); }
  auto begin() const noexcept { return families_.begin(); }
  auto end() const noexcept { return families_.end(); }

  const RvMarginal& marginal_x() const { return families_.front().marginal_x(); }
  const RvMarginal& marginal_y() const { return families_.front().marginal_y(); }

 private:
  std::vector<DependenceFamily> families_;
};

struct FactorCheck {
  std::string factor;  // "h1", "h2" or "g"
  double theta = 0.0;
  double delta = 0.0;
  double x = 0.0;
  double empirical = 0.0;
  double std_error = 0.0;
  double expected = 0.0;
  std::size_t conditioning_count = 0;
  std::size_t hits = 0;
  bool flagged = false;
};

struct AssumptionReport {
  double mean_h1 = 0.0;
  double mean_h2 = 0.0;
  double mean_g = 0.0;
  bool mean_one_ok = false;
  double epsilon = 0.0;
  double moment_margin_x = 0.0;  // E[Theta^(alpha+eps) h1(Theta)]
  double moment_margin_y = 0.0;  // E[Delta^(beta+eps) h2(Delta)]
  double hill_x = 0.0;
  double hill_y = 0.0;
  std::vector<FactorCheck> checks;

  bool flagged() const noexcept;
};

/// Quadrature mean-one checks, moment margins, and empirical conditional tail
/// ratios on eps-bins of width support/64 around probe weights.
AssumptionReport verify_assumptions(const DependenceFamily& family, std::size_t sample_count,
                                    std::span<const double> x_grid, double epsilon,
                                    std::uint64_t seed);

}  // namespace brvlab
