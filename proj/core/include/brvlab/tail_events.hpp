#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "brvlab/dep_families.hpp"

namespace brvlab {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Events on the weighted partial sums S_k = sum_{i<=k} Theta_i phi(X_i - c_x) and
/// T_k = sum_{i<=k} Delta_i phi(Y_i - c_y), k = 1..n.
enum class PathEvent {
  first,     // S_n > a
  second,    // T_n > b
  corner,    // S_n > a and T_n > b
  either,    // S_n > a or T_n > b
  ruin_and,  // max_k S_k > a and max_k T_k > b
  ruin_sim,  // S_k > a and T_k > b for some k
  ruin_or,   // max_k S_k > a or max_k T_k > b
};

const char* to_string(PathEvent e) noexcept;

/// Constant premiums subtracted from each claim; phi is the identity or the
/// positive part.
struct PathModel {
  double premium_x = 0.0;
  double premium_y = 0.0;
  bool positive_part = false;
};

struct Path {
  std::vector<double> theta;
  std::vector<double> delta;
  std::vector<double> x;
  std::vector<double> y;

  std::size_t size() const noexcept { return x.size(); }
  void clear() noexcept;
  void push(const JointDraw& d);
};

bool path_indicator(PathEvent e, const Path& path, double a, double b, const PathModel& model);

/// Unbiased conditional estimate of P[event]: sum over i of the probability of
/// the event jointly with index i carrying the most extreme claim, given every
/// variable except (X_i, Y_i). Index i uses seq[i].
double path_conditional_probability(PathEvent e, const FamilySequence& seq, const Path& path,
                                    double a, double b, const PathModel& model);

/// Upper-right quadrant {X > a, Y > b} on the extended reals.
struct Quadrant {
  double a;
  double b;
};

/// P[(X, Y) in union of quadrants] under the conditional law of one index.
double quadrant_union_probability(const DependenceFamily& fam, double theta, double delta,
                                  std::vector<Quadrant> quadrants);

}  // namespace brvlab
