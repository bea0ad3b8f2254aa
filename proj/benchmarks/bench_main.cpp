#include <benchmark/benchmark.h>

#include "brvlab/asymptotics.hpp"
#include "brvlab/dep_families.hpp"
#include "brvlab/limit_measure.hpp"
#include "brvlab/mc_engine.hpp"
#include "brvlab/rng.hpp"

using namespace brvlab;

namespace {

DependenceFamily mixture() {
  const RvMarginal m(2.0, 1.0);
  return DependenceFamily::joint_mixture(
      m, RvMarginal(3.0, 1.0), WeightPair(WeightLaw::uniform(0.5, 2.0), WeightLaw::uniform(0.2, 1.0)),
      MixingFunction{0.25, 0.125, 0.125});
}

void BM_CornerQuadrature(benchmark::State& state) {
  const auto fam = mixture();
  double p = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(corner_mass_product(fam, p, 0.9));
    p = p == 1.0 ? 1.0001 : 1.0;
  }
}
BENCHMARK(BM_CornerQuadrature);

void BM_JesFactor(benchmark::State& state) {
  const auto fam = mixture();
  for (auto _ : state) benchmark::DoNotOptimize(jes_factor(fam));
}
BENCHMARK(BM_JesFactor)->Unit(benchmark::kMillisecond);

void BM_Sample(benchmark::State& state) {
  const auto fam = DependenceFamily::marginal_tilt(
      RvMarginal(2.0, 1.0), RvMarginal(2.0, 1.0),
      WeightPair(WeightLaw::uniform(0.0, 2.0), WeightLaw::uniform(0.0, 2.0)), 0.5, -0.5);
  RngStream rng(mix_seed(1, 0));
  for (auto _ : state) benchmark::DoNotOptimize(fam.sample(rng));
}
BENCHMARK(BM_Sample);

void BM_SumCorner(benchmark::State& state) {
  const auto seq = FamilySequence::iid(mixture(), static_cast<std::size_t>(state.range(0)));
  McOptions opts;
  opts.samples = 20000;
  opts.kind = state.range(1) ? EstimatorKind::conditional : EstimatorKind::plain;
  for (auto _ : state) benchmark::DoNotOptimize(estimate_scaled_sum_corner(seq, 1.0, 1.0, 1e4, opts));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(opts.samples));
}
BENCHMARK(BM_SumCorner)->ArgsProduct({{1, 3, 10}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_RunBlocks(benchmark::State& state) {
  McOptions opts;
  opts.samples = 1 << 20;
  opts.workers = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto acc = run_blocks(1, opts, [](const StreamSpec& s, std::size_t count, MomentAccumulator& a) {
      RngStream rng = s.open();
      for (std::size_t i = 0; i < count; ++i) {
        const double v[1] = {rng.uniform()};
        a.add(v);
      }
    });
    benchmark::DoNotOptimize(acc.mean(0));
  }
}
BENCHMARK(BM_RunBlocks)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
