#include <cmath>
#include <cstring>

#include "brvlab/dep_families.hpp"
#include "brvlab/error.hpp"
#include "brvlab/risk_sim.hpp"
#include "doctest.h"

using namespace brvlab;

namespace {

const RvMarginal kPareto2(2.0, 1.0);
const WeightPair kOnes(WeightLaw::constant(1.0), WeightLaw::constant(1.0));

DependenceFamily comonotone() {
  return DependenceFamily::joint_mixture(kPareto2, kPareto2, kOnes, MixingFunction{1.0, 0.0, 0.0});
}

DependenceFamily mixture() {
  return DependenceFamily::joint_mixture(
      kPareto2, kPareto2, WeightPair(WeightLaw::uniform(0.5, 2.0), WeightLaw::uniform(0.2, 1.0)),
      MixingFunction{0.25, 0.125, 0.125});
}

McOptions options(std::size_t samples, std::uint64_t seed) {
  McOptions o;
  o.samples = samples;
  o.seed = seed;
  return o;
}

}  // namespace

TEST_CASE("comonotone zero-premium ruin is exactly 4 / x^2") {
  const auto seq = FamilySequence::iid(comonotone(), 1);
  for (double x : {1e2, 1e4}) {
    const auto r = estimate_psi(RuinKind::and_ruin, {}, seq, x, 0.5, 0.5, options(10000, 1));
    CHECK(r.estimate.point == doctest::Approx(4.0 / (x * x)).epsilon(1e-12));
    CHECK(r.horizon == 1);
  }
}

TEST_CASE("ruin probabilities are ordered and the or-decomposition holds") {
  const auto seq = FamilySequence::iid(mixture(), 4);
  const NetLossModel model{1.5, 0.6};
  for (auto kind : {EstimatorKind::conditional, EstimatorKind::plain}) {
    auto opts = options(40000, 0x99);
    opts.kind = kind;
    const auto r = estimate_ruin(model, seq, 40.0, 0.4, 0.6, opts);
    CHECK(r.sim_ruin.point <= r.and_ruin.point + 1e-15);
    CHECK(r.and_ruin.point <= r.or_ruin.point + 1e-15);
    CHECK(r.or_by_parts.point == doctest::Approx(r.or_ruin.point).epsilon(1e-10));
    CHECK(r.or_ruin.point <= r.first.point + r.second.point + 1e-15);
    CHECK(r.and_over_sim.point >= 1.0 - 1e-12);
  }
}

TEST_CASE("ruin indicators are consistent path by path") {
  const auto seq = FamilySequence::iid(mixture(), 5);
  const auto paths = simulate_paths({1.0, 0.5}, seq, 30.0, 0.5, 0.5, 20000, 0x31);
  CHECK(paths.size() == 20000);
  std::size_t any = 0;
  for (const auto& p : paths) {
    if (p.sim_ruin) CHECK(p.and_ruin);
    CHECK(p.and_ruin == (p.first_ruin && p.second_ruin));
    CHECK(p.or_ruin == (p.first_ruin || p.second_ruin));
    any += p.or_ruin;
  }
  CHECK(any > 0);
}

TEST_CASE("ruin probability falls as capital grows") {
  const auto seq = FamilySequence::iid(mixture(), 3);
  for (auto kind : {RuinKind::and_ruin, RuinKind::sim_ruin, RuinKind::or_ruin}) {
    double prev = 1.0;
    for (double x : {10.0, 30.0, 100.0, 300.0}) {
      const auto r = estimate_psi(kind, {1.0, 0.5}, seq, x, 0.5, 0.5, options(20000, 0x44));
      CHECK(r.estimate.point <= prev);
      prev = r.estimate.point;
    }
  }
}

TEST_CASE("capital split is validated") {
  const auto seq = FamilySequence::iid(mixture(), 1);
  CHECK_THROWS_AS(estimate_psi(RuinKind::and_ruin, {}, seq, 10.0, 0.5, 0.6, options(10000, 1)), DomainError);
  CHECK_THROWS_AS(estimate_psi(RuinKind::and_ruin, {}, seq, 10.0, 0.0, 1.0, options(10000, 1)), DomainError);
}

TEST_CASE("positive-part gap lies in (0, 1]") {
  const auto seq = FamilySequence::iid(mixture(), 3);
  for (double x : {1e1, 1e2, 1e3}) {
    const auto g = positive_part_gap({1.0, 0.5}, seq, x, 0.5, 0.5, options(20000, 0x66));
    CHECK(g.point > 0.0);
    CHECK(g.point <= 1.0 + 1e-12);
  }
  const auto zero = positive_part_gap({}, seq, 1e2, 0.5, 0.5, options(20000, 0x66));
  CHECK(zero.point == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("stopped sums are reproducible per stream") {
  const StoppingLaw n({{1, 0.5}, {3, 0.5}});
  const StreamSpec spec{0x1234, 17};
  const auto a = sample_stopped_sums(mixture(), n, spec);
  const auto b = sample_stopped_sums(mixture(), n, spec);
  CHECK(a == b);
  CHECK(a.first > 0.0);
}

TEST_CASE("constant stopping count matches the fixed horizon") {
  const auto fam = mixture();
  const auto opts = options(20000, 0x88);
  const auto stopped = estimate_stopped_sum_tails(fam, StoppingLaw::constant(2), 1.0, 1.0, 1e3, opts);
  const auto fixed = estimate_sum_tails(PathSource::fixed(FamilySequence::iid(fam, 2)), 1.0, 1.0, 1e3, opts);
  const double se = std::hypot(stopped.box.std_error, fixed.box.std_error);
  CHECK(std::abs(stopped.box.point - fixed.box.point) < 5.0 * se);
}

TEST_CASE("stopped box grows with the mean count") {
  const auto fam = mixture();
  const auto opts = options(40000, 0x89);
  const auto one = estimate_stopped_sum_tails(fam, StoppingLaw::constant(1), 1.0, 1.0, 1e4, opts);
  const auto three = estimate_stopped_sum_tails(fam, StoppingLaw::constant(3), 1.0, 1.0, 1e4, opts);
  CHECK(three.box.point > 2.5 * one.box.point);
}

TEST_CASE("empirical JES of the comonotone model") {
  const auto e = jes_empirical(comonotone(), 1e6, options(100000, 0x3e5));
  CHECK(std::abs(e.factor.point - 2.0) < 4.0 * e.factor.std_error + 0.01);
  CHECK(e.independent_share.point == doctest::Approx(0.0));
}

TEST_CASE("JES preconditions") {
  const auto heavy = DependenceFamily::joint_mixture(RvMarginal(1.0, 1.0), kPareto2, kOnes, MixingFunction{1.0, 0.0, 0.0});
  CHECK_THROWS_AS(jes_empirical(heavy, 1e3, options(10000, 1)), AssumptionViolation);
  const auto indep = DependenceFamily::independence(kPareto2, kPareto2, kOnes);
  CHECK_THROWS_AS(jes_empirical(indep, 1e3, options(10000, 1)), AssumptionViolation);
}
