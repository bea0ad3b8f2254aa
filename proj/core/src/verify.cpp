#include <algorithm>
#include <cmath>
#include <vector>

#include "brvlab/dep_families.hpp"
#include "brvlab/error.hpp"

namespace brvlab {

namespace {

constexpr double kProbeLevels[] = {0.125, 0.5, 0.875};
constexpr double kBinsPerSupport = 64.0;
constexpr double kFlagMultiple = 5.0;
constexpr double kMeanOneTolerance = 1e-10;

// Quantile-level interval [lo, hi) of the eps-bin around t.
struct LevelBin {
  double lo;
  double hi;
};

LevelBin level_bin(const WeightLaw& law, double t) {
  if (law.kind() == WeightLaw::Kind::discrete) {
    const auto j = *law.atom_index(t);
    const double hi = law.cdf(t);
    return {hi - law.atoms()[j].prob, hi};
  }
  const double half = 0.5 * (law.hi() - law.lo()) / kBinsPerSupport;
  return {law.cdf(std::max(law.lo(), t - half)), law.cdf(std::min(law.hi(), t + half))};
}

double draw_in(const WeightLaw& law, const LevelBin& bin, RngStream& rng) {
  return law.quantile(bin.lo + (bin.hi - bin.lo) * rng.uniform());
}

struct Tally {
  std::size_t count = 0;
  std::size_t hits = 0;
  double factor_sum = 0.0;
};

void finish(FactorCheck& c, const Tally& t, double base_prob) {
  c.conditioning_count = t.count;
  c.hits = t.hits;
  const double p = static_cast<double>(t.hits) / static_cast<double>(t.count);
  c.empirical = p / base_prob;
  c.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(t.count)) / base_prob;
  c.expected = t.factor_sum / static_cast<double>(t.count);
  c.flagged = t.hits > 0 && std::abs(c.empirical - c.expected) > kFlagMultiple * c.std_error;
}

}  // namespace

bool AssumptionReport::flagged() const noexcept {
  if (!mean_one_ok) return true;
  return std::any_of(checks.begin(), checks.end(), [](const FactorCheck& c) { return c.flagged; });
}

AssumptionReport verify_assumptions(const DependenceFamily& fam, std::size_t sample_count,
                                    std::span<const double> x_grid, double epsilon,
                                    std::uint64_t seed) {
  if (sample_count < 10000) throw DomainError("verify_assumptions needs sample_count >= 1e4");
  if (!(epsilon > 0.0)) throw DomainError("moment margin epsilon must be > 0");
  for (double x : x_grid) {
    if (!(x > 1.0) || !std::isfinite(x)) throw DomainError("x grid values must be finite and > 1");
  }

  const auto& w = fam.weights();
  const auto& mx = fam.marginal_x();
  const auto& my = fam.marginal_y();

  AssumptionReport r;
  r.epsilon = epsilon;
  r.mean_h1 = w.theta().expect([&](double t) { return fam.h1(t); });
  r.mean_h2 = w.delta().expect([&](double d) { return fam.h2(d); });
  r.mean_g = w.expect([&](double t, double d) { return fam.g(t, d); });
  r.mean_one_ok = std::abs(r.mean_h1 - 1.0) <= kMeanOneTolerance &&
                  std::abs(r.mean_h2 - 1.0) <= kMeanOneTolerance &&
                  std::abs(r.mean_g - 1.0) <= kMeanOneTolerance;
  r.moment_margin_x = fam.tilted_moment_x(mx.alpha() + epsilon);
  r.moment_margin_y = fam.tilted_moment_y(my.alpha() + epsilon);

  std::uint64_t task = 0;
  {
    RngStream rng(mix_seed(seed, task++));
    std::vector<double> xs(sample_count);
    std::vector<double> ys(sample_count);
    for (std::size_t i = 0; i < sample_count; ++i) {
      const auto d = fam.sample(rng);
      xs[i] = d.x;
      ys[i] = d.y;
    }
    const std::size_t k = std::max<std::size_t>(2, sample_count / 100);
    r.hill_x = hill_estimate(xs, k);
    r.hill_y = hill_estimate(ys, k);
  }

  const bool comonotone = w.coupling() == WeightCoupling::comonotone;
  for (double x : x_grid) {
    const double a = mx.normalization(x);
    const double b = my.normalization(x);
    const double joint = w.expect(
        [&](double t, double d) { return fam.conditional_joint_survival(t, d, a, b); });

    for (double u : kProbeLevels) {
      const double theta = w.theta().quantile(u);
      const double delta = w.delta().quantile(u);
      const LevelBin tb = level_bin(w.theta(), theta);
      const LevelBin db = level_bin(w.delta(), delta);

      Tally h1t, h2t;
      RngStream r1(mix_seed(seed, task++));
      for (std::size_t i = 0; i < sample_count; ++i) {
        const double lvl = tb.lo + (tb.hi - tb.lo) * r1.uniform();
        const double t = w.theta().quantile(lvl);
        const double d = comonotone ? w.delta().quantile(lvl) : w.delta().sample(r1);
        const auto m = fam.sample_given(t, d, r1);
        ++h1t.count;
        h1t.hits += m.x > a;
        h1t.factor_sum += fam.h1(t);
      }
      RngStream r2(mix_seed(seed, task++));
      for (std::size_t i = 0; i < sample_count; ++i) {
        const double lvl = db.lo + (db.hi - db.lo) * r2.uniform();
        const double d = w.delta().quantile(lvl);
        const double t = comonotone ? w.theta().quantile(lvl) : w.theta().sample(r2);
        const auto m = fam.sample_given(t, d, r2);
        ++h2t.count;
        h2t.hits += m.y > b;
        h2t.factor_sum += fam.h2(d);
      }
      FactorCheck c1{"h1", theta, delta, x};
      finish(c1, h1t, 1.0 / x);
      r.checks.push_back(c1);
      FactorCheck c2{"h2", theta, delta, x};
      finish(c2, h2t, 1.0 / x);
      r.checks.push_back(c2);

      Tally gt;
      RngStream r3(mix_seed(seed, task++));
      for (std::size_t i = 0; i < sample_count; ++i) {
        const double lvl = tb.lo + (tb.hi - tb.lo) * r3.uniform();
        const double t = w.theta().quantile(lvl);
        const double d = comonotone ? w.delta().quantile(lvl) : draw_in(w.delta(), db, r3);
        const auto m = fam.sample_given(t, d, r3);
        ++gt.count;
        gt.hits += (m.x > a && m.y > b);
        gt.factor_sum += fam.g(t, d);
      }
      FactorCheck cg{"g", theta, delta, x};
      finish(cg, gt, joint);
      r.checks.push_back(cg);
    }
  }
  return r;
}

}  // namespace brvlab
