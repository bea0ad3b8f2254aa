#pragma once

#include <cstddef>
#include <vector>

#include "brvlab/dep_families.hpp"
#include "brvlab/rng.hpp"

namespace brvlab {

/// Base limit tail of (X, Y) in normalized coordinates.
struct LimitMeasureSpec {
  double alpha = 1.0;
  double beta = 1.0;
  double w_bar = 0.0;

  static LimitMeasureSpec of(const DependenceFamily& fam);
};

/// w_bar * min(x^-alpha, y^-beta) for x, y > 0.
double mu_bar(const LimitMeasureSpec& spec, double x, double y);

/// E[g(Theta, Delta) mu_bar(p / Theta, q / Delta)].
double corner_mass_product(const DependenceFamily& fam, double p, double q);
/// E[Theta^alpha h1(Theta)] / p^alpha.
double marginal_mass_x(const DependenceFamily& fam, double p);
/// E[Delta^beta h2(Delta)] / q^beta.
double marginal_mass_y(const DependenceFamily& fam, double q);
/// Mass of the complement of [0, p) x [0, q) under the product limit measure.
double mu_hat_product_box(const DependenceFamily& fam, double p, double q);

/// Corner mass through the independent-weights formula
/// w_bar * int_0^inf P[(Theta/p)^alpha > t] P[(Delta/q)^beta > t] dt.
/// Requires h1 = h2 = g = 1 and independently coupled weights.
double corner_mass_independent_weights(const DependenceFamily& fam, double p, double q);
double mu_hat_product_box_independent_weights(const DependenceFamily& fam, double p, double q);

double sum_corner_mass(const FamilySequence& seq, double p, double q);
double sum_marginal_mass_x(const FamilySequence& seq, double p);
double sum_marginal_mass_y(const FamilySequence& seq, double q);
/// Box mass of the weighted-sum limit measure: per-index terms summed.
double mu_hat_sum_box(const FamilySequence& seq, double p, double q);

/// Law of the stopping count N: finitely many non-negative integer atoms.
class StoppingLaw {
 public:
  struct Atom {
    std::size_t value;
    double prob;
  };

  explicit StoppingLaw(std::vector<Atom> atoms);
  static StoppingLaw constant(std::size_t n) { return StoppingLaw({{n, 1.0}}); }
  static StoppingLaw uniform(std::size_t lo, std::size_t hi);

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  double mean() const noexcept;
  std::size_t max() const noexcept { return atoms_.back().value; }
  std::size_t sample(RngStream& rng) const;

 private:
  std::vector<Atom> atoms_;
  std::vector<double> cumulative_;
};

/// E[N] times the single-index box mass.
double mu_tilde_stopped_box(const DependenceFamily& fam, const StoppingLaw& n, double p, double q);

}  // namespace brvlab
