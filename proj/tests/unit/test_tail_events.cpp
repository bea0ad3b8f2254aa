#include <cmath>
#include <string>
#include <vector>

#include "brvlab/dep_families.hpp"
#include "brvlab/rng.hpp"
#include "brvlab/tail_events.hpp"
#include "doctest.h"

using namespace brvlab;

namespace {

const RvMarginal kPareto2(2.0, 1.0);

DependenceFamily mixture() {
  return DependenceFamily::joint_mixture(
      kPareto2, kPareto2, WeightPair(WeightLaw::uniform(0.5, 2.0), WeightLaw::uniform(0.2, 1.0)),
      MixingFunction{0.25, 0.125, 0.125});
}

DependenceFamily tilted() {
  return DependenceFamily::marginal_tilt(
      kPareto2, kPareto2, WeightPair(WeightLaw::uniform(0.0, 2.0), WeightLaw::uniform(0.0, 2.0)), 0.8, -0.5);
}

const PathEvent kAllEvents[] = {PathEvent::first,    PathEvent::second,   PathEvent::corner,
                                PathEvent::either,   PathEvent::ruin_and, PathEvent::ruin_sim,
                                PathEvent::ruin_or};

}  // namespace

TEST_CASE("single quadrant is the joint survival") {
  const auto fam = mixture();
  CHECK(quadrant_union_probability(fam, 1.0, 0.5, {{3.0, 4.0}}) ==
        doctest::Approx(fam.conditional_joint_survival(1.0, 0.5, 3.0, 4.0)).epsilon(1e-14));
  CHECK(quadrant_union_probability(fam, 1.0, 0.5, {}) == 0.0);
}

TEST_CASE("two quadrants follow inclusion-exclusion") {
  for (const auto& fam : {mixture(), tilted()}) {
    const double t = 1.0, d = 0.5;
    const double a1 = 2.0, b1 = 9.0, a2 = 6.0, b2 = 3.0;
    const double expected = fam.conditional_joint_survival(t, d, a1, b1) +
                            fam.conditional_joint_survival(t, d, a2, b2) -
                            fam.conditional_joint_survival(t, d, a2, b1);
    CHECK(quadrant_union_probability(fam, t, d, {{a1, b1}, {a2, b2}}) ==
          doctest::Approx(expected).epsilon(1e-12));
    // a nested quadrant adds nothing
    CHECK(quadrant_union_probability(fam, t, d, {{a1, b1}, {a2, b2}, {7.0, 10.0}}) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("three quadrants on a staircase") {
  const auto fam = tilted();
  const double t = 0.4, d = 1.5;
  auto s = [&](double a, double b) { return fam.conditional_joint_survival(t, d, a, b); };
  // {a1<a2<a3}, {b1>b2>b3}: sum of singles minus overlaps of neighbours plus nothing else
  const double expected = s(1.0, 8.0) + s(3.0, 4.0) + s(5.0, 2.0) - s(3.0, 8.0) - s(5.0, 4.0);
  CHECK(quadrant_union_probability(fam, t, d, {{5.0, 2.0}, {1.0, 8.0}, {3.0, 4.0}}) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("pathwise ordering of events") {
  RngStream rng(mix_seed(0x0d, 0));
  const auto fam = mixture();
  const PathModel model{1.0, 0.5, false};
  const PathModel pp{1.0, 0.5, true};
  Path path;
  for (int rep = 0; rep < 20000; ++rep) {
    path.clear();
    for (int i = 0; i < 4; ++i) path.push(fam.sample(rng));
    const double a = 3.0, b = 2.0;
    auto ind = [&](PathEvent e, const PathModel& m = {1.0, 0.5, false}) { return path_indicator(e, path, a, b, m); };
    if (ind(PathEvent::corner)) CHECK(ind(PathEvent::ruin_sim));
    if (ind(PathEvent::ruin_sim)) CHECK(ind(PathEvent::ruin_and));
    if (ind(PathEvent::ruin_and)) CHECK(ind(PathEvent::ruin_or));
    CHECK(ind(PathEvent::either) == (ind(PathEvent::first) || ind(PathEvent::second)));
    for (auto e : kAllEvents) {
      if (path_indicator(e, path, a, b, model)) CHECK(path_indicator(e, path, a, b, pp));
    }
  }
}

TEST_CASE("single index conditional probability is the weighted joint survival") {
  const auto fam = tilted();
  const auto seq = FamilySequence::iid(fam, 1);
  Path path;
  path.push({5.0, 7.0, 1.5, 0.5, Branch::independent});
  const PathModel model{0.0, 0.0, false};
  CHECK(path_conditional_probability(PathEvent::corner, seq, path, 30.0, 4.0, model) ==
        doctest::Approx(fam.conditional_joint_survival(1.5, 0.5, 20.0, 8.0)).epsilon(1e-12));
  CHECK(path_conditional_probability(PathEvent::first, seq, path, 30.0, 4.0, model) ==
        doctest::Approx(fam.conditional_survival_x(1.5, 20.0)).epsilon(1e-12));
}

TEST_CASE("zero weight never exceeds a positive level") {
  const auto fam = tilted();
  const auto seq = FamilySequence::iid(fam, 1);
  Path path;
  path.push({5.0, 7.0, 0.0, 1.0, Branch::independent});
  CHECK(path_conditional_probability(PathEvent::corner, seq, path, 1.0, 1.0, {}) == 0.0);
  CHECK(path_conditional_probability(PathEvent::corner, seq, path, -1.0, 1.0, {}) ==
        doctest::Approx(fam.conditional_survival_y(1.0, 1.0)).epsilon(1e-14));
}

TEST_CASE("conditional estimator is unbiased against the indicator") {
  const auto fam = mixture();
  const auto seq = FamilySequence::iid(fam, 3);
  for (const PathModel model : {PathModel{0.0, 0.0, false}, PathModel{2.0, 1.0, false}, PathModel{2.0, 1.0, true}}) {
    for (auto e : kAllEvents) {
      CAPTURE(std::string(to_string(e)));
      CAPTURE(model.positive_part);
      RngStream rng(mix_seed(0x77, static_cast<std::uint64_t>(e)));
      const int n = 60000;
      double sc = 0.0, sc2 = 0.0, si = 0.0;
      Path path;
      for (int rep = 0; rep < n; ++rep) {
        path.clear();
        for (int i = 0; i < 3; ++i) path.push(fam.sample(rng));
        const double c = path_conditional_probability(e, seq, path, 6.0, 3.0, model);
        // a sum of three conditional probabilities
        CHECK_UNARY(c >= 0.0 && c <= 3.0);
        sc += c;
        sc2 += c * c;
        si += path_indicator(e, path, 6.0, 3.0, model) ? 1.0 : 0.0;
      }
      const double pc = sc / n, pi = si / n;
      const double se = std::sqrt((sc2 / n - pc * pc) / n + pi * (1.0 - pi) / n);
      CHECK(std::abs(pc - pi) < 5.0 * se);
    }
  }
}
