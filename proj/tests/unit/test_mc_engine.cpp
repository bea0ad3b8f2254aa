#include <cmath>
#include <cstring>
#include <vector>

#include "brvlab/dep_families.hpp"
#include "brvlab/error.hpp"
#include "brvlab/limit_measure.hpp"
#include "brvlab/mc_engine.hpp"
#include "brvlab/rng.hpp"
#include "doctest.h"

using namespace brvlab;

namespace {

const RvMarginal kPareto2(2.0, 1.0);

DependenceFamily half_mixture() {
  return DependenceFamily::joint_mixture(
      kPareto2, kPareto2, WeightPair(WeightLaw::uniform(0.0, 2.0), WeightLaw::uniform(0.0, 2.0)),
      MixingFunction{0.5, 0.0, 0.0});
}

FamilySequence two_index_sequence() {
  const WeightPair ones(WeightLaw::constant(1.0), WeightLaw::constant(1.0));
  return FamilySequence({DependenceFamily::joint_mixture(kPareto2, kPareto2, ones, MixingFunction{0.25, 0.0, 0.0}),
                         DependenceFamily::joint_mixture(kPareto2, kPareto2, ones, MixingFunction{0.75, 0.0, 0.0})});
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("estimate confidence interval") {
  const auto e = Estimate::from(2.0, 0.5, 100, 10);
  CHECK(e.ci_lo == doctest::Approx(2.0 - 1.959963984540054 * 0.5));
  CHECK(e.ci_hi == doctest::Approx(2.0 + 1.959963984540054 * 0.5));
  CHECK_FALSE(e.degenerate);
  CHECK(Estimate::from(0.0, 0.0, 100, 0).degenerate);
}

TEST_CASE("merging estimates weights by sample count") {
  const std::vector<Estimate> parts{Estimate::from(1.0, 0.1, 100, 5), Estimate::from(4.0, 0.2, 300, 7)};
  const auto m = merge(parts);
  CHECK(m.point == doctest::Approx(3.25));
  CHECK(m.n == 400);
  CHECK(m.hits == 12);
  CHECK_THROWS(merge(std::span<const Estimate>{}));
}

TEST_CASE("moment accumulator matches direct formulas") {
  RngStream rng(mix_seed(1, 2));
  MomentAccumulator all(2), left(2), right(2);
  std::vector<double> a, b;
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform(), v = u * u + rng.uniform();
    const double row[2] = {u, v};
    all.add(row);
    (i < 377 ? left : right).add(row);
    a.push_back(u);
    b.push_back(v);
  }
  double ma = 0, mb = 0;
  for (int i = 0; i < 1000; ++i) ma += a[i], mb += b[i];
  ma /= 1000, mb /= 1000;
  double cab = 0;
  for (int i = 0; i < 1000; ++i) cab += (a[i] - ma) * (b[i] - mb);
  cab /= 999;
  CHECK(all.mean(0) == doctest::Approx(ma).epsilon(1e-13));
  CHECK(all.covariance(0, 1) == doctest::Approx(cab).epsilon(1e-12));
  left.merge(right);
  CHECK(left.count() == 1000);
  CHECK(left.mean(1) == doctest::Approx(mb).epsilon(1e-13));
  CHECK(left.covariance(0, 1) == doctest::Approx(cab).epsilon(1e-12));
  CHECK(all.hits(0) == 1000);

  // delta method: var(a/b) ~ (var a - 2 r cov + r^2 var b) / (n mb^2)
  const double r = ma / mb;
  double va = 0, vb = 0;
  for (int i = 0; i < 1000; ++i) va += (a[i] - ma) * (a[i] - ma), vb += (b[i] - mb) * (b[i] - mb);
  va /= 999, vb /= 999;
  const auto ratio = all.ratio(0, 1);
  CHECK(ratio.point == doctest::Approx(r).epsilon(1e-13));
  CHECK(ratio.std_error == doctest::Approx(std::sqrt((va - 2 * r * cab + r * r * vb) / 1000.0) / mb).epsilon(1e-9));

  const double coefs[2] = {2.0, -1.0};
  const auto lin = all.linear(coefs, 3.0);
  CHECK(lin.point == doctest::Approx(3.0 * (2 * ma - mb)).epsilon(1e-13));
  CHECK(lin.std_error == doctest::Approx(3.0 * std::sqrt((4 * va - 4 * cab + vb) / 1000.0)).epsilon(1e-9));
}

TEST_CASE("run_blocks is bit-identical across worker counts") {
  const auto fam = half_mixture();
  std::vector<Estimate> results;
  for (std::size_t workers : {1u, 4u, 8u}) {
    McOptions opts;
    opts.samples = 30000;
    opts.seed = 0xbeef;
    opts.workers = workers;
    results.push_back(estimate_scaled_corner(fam, 1.0, 1.0, 1e3, opts));
    const auto sums = estimate_sum_tails(PathSource::fixed(FamilySequence::iid(fam, 3)), 1.0, 1.0, 1e3, opts);
    results.push_back(sums.box);
    results.push_back(sums.corner_given_second);
  }
  for (std::size_t i = 3; i < results.size(); ++i) {
    CHECK(same_bits(results[i].point, results[i % 3].point));
    CHECK(same_bits(results[i].std_error, results[i % 3].std_error));
  }
}

TEST_CASE("run_blocks propagates exceptions and covers every sample") {
  McOptions opts;
  opts.samples = 10000;
  opts.block_size = 999;
  opts.workers = 3;
  const auto acc = run_blocks(1, opts, [](const StreamSpec&, std::size_t count, MomentAccumulator& a) {
    const double one[1] = {1.0};
    for (std::size_t i = 0; i < count; ++i) a.add(one);
  });
  CHECK(acc.count() == 10000);
  CHECK_THROWS_AS(run_blocks(1, opts,
                             [](const StreamSpec& s, std::size_t, MomentAccumulator&) {
                               if (s.task_index == 5) throw NumericFailure("boom");
                             }),
                  NumericFailure);
}

TEST_CASE("scaled corner estimate near the limit") {
  const auto fam = half_mixture();
  McOptions opts;
  opts.samples = 200000;
  opts.seed = 0x51;
  const auto e = estimate_scaled_corner(fam, 1.0, 1.0, 1e5, opts);
  CHECK(std::abs(e.point - 1.0 / 3.0) < 4.0 * e.std_error);
  CHECK(e.std_error < 0.005);
}

TEST_CASE("confidence intervals cover the limit at large x") {
  const auto fam = half_mixture();
  int covered = 0;
  const int reps = 200;
  for (int r = 0; r < reps; ++r) {
    McOptions opts;
    opts.samples = 10000;
    opts.seed = 0xc0e0 + static_cast<std::uint64_t>(r);
    const auto e = estimate_scaled_corner(fam, 1.0, 1.0, 1e7, opts);
    covered += (e.ci_lo <= 1.0 / 3.0 && 1.0 / 3.0 <= e.ci_hi);
  }
  // nominal 95%; binomial sd is about 1.5%
  CHECK(covered >= 180);
}

TEST_CASE("sum corner error shrinks along the x grid") {
  const auto seq = two_index_sequence();
  McOptions opts;
  opts.samples = 100000;
  opts.seed = 0x7e;
  double prev = 1e300;
  for (double x : {1e2, 1e3, 1e4, 1e5}) {
    const auto e = estimate_scaled_sum_corner(seq, 1.0, 1.0, x, opts);
    const double err = std::abs(e.point - sum_corner_mass(seq, 1.0, 1.0));
    CAPTURE(x);
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("marginal sum tail is additive far out") {
  const auto seq = two_index_sequence();
  McOptions opts;
  opts.samples = 100000;
  opts.seed = 0x2a;
  const auto e = estimate_marginal_sum_tail(seq, Side::first, 1.0, 1e8, opts);
  CHECK(e.point == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("plain estimator warns on few hits") {
  const auto fam = half_mixture();
  McOptions opts;
  opts.samples = 2000;
  opts.kind = EstimatorKind::plain;
  const auto e = estimate_scaled_corner(fam, 1.0, 1.0, 1e6, opts);
  CHECK(e.hits < kMinReliableHits);
  CHECK_FALSE(e.warning.empty());
}

TEST_CASE("estimator arguments are validated") {
  const auto fam = half_mixture();
  McOptions opts;
  opts.samples = 10;
  CHECK_THROWS_AS(estimate_scaled_corner(fam, 1.0, 1.0, 1e3, opts), DomainError);
  opts.samples = 10000;
  CHECK_THROWS_AS(estimate_scaled_corner(fam, 1.0, 1.0, 0.5, opts), DomainError);
}
