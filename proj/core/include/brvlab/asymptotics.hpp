#pragma once

#include <functional>

#include "brvlab/dep_families.hpp"
#include "brvlab/weight_law.hpp"

namespace brvlab {

/// E[Theta^alpha h(Theta)].
double breiman_constant(const WeightLaw& weight, const std::function<double(double)>& h,
                        double alpha);

/// q^beta * (sum of corner terms) / (sum of E[Delta_i^beta h2(Delta_i)]), unclamped.
double cr_limit(const FamilySequence& seq, double p, double q);

struct RuinAsymptote {
  double and_sim_coefficient = 0.0;  // multiplier of the common survival at capital x
  double or_coefficient = 0.0;
  double and_sim = 0.0;  // coefficient * survival(x)
  double or_value = 0.0;
  bool degenerate = false;  // and/sim coefficient is zero
};

/// Ruin asymptotics for the standard structure (shared marginal, alpha = beta),
/// capital split p + q = 1.
RuinAsymptote ruin_asymptote(const FamilySequence& seq, double p, double q, double x);

/// Limit of the joint expected shortfall of Theta X, normalized by U_F(x):
/// 1 + int_1^inf corner(xi, 1) / corner(1, 1) dxi.
double jes_factor(const DependenceFamily& fam);

/// Same limit by Fubini: both the inner xi-integral and the weight expectation
/// in closed form per (theta, delta). Independent route for tests and diagnostics.
double jes_factor_fubini(const DependenceFamily& fam);

}  // namespace brvlab
