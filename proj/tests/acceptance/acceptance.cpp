// Acceptance suite: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "brvlab/asymptotics.hpp"
#include "brvlab/dep_families.hpp"
#include "brvlab/error.hpp"
#include "brvlab/limit_measure.hpp"
#include "brvlab/mc_engine.hpp"
#include "brvlab/risk_sim.hpp"

using namespace brvlab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

const RvMarginal kPareto2(2.0, 1.0);

WeightPair unit_uniform_pair() {
  return WeightPair(WeightLaw::uniform(0.0, 2.0), WeightLaw::uniform(0.0, 2.0));
}

// Variant C with w = 1/2 and independent U(0, 2) weights: corner 1/3, box 7/3.
DependenceFamily third_config() {
  return DependenceFamily::joint_mixture(kPareto2, kPareto2, unit_uniform_pair(), MixingFunction{0.5, 0.0, 0.0});
}

DependenceFamily comonotone(double alpha) {
  const RvMarginal m(alpha, 1.0);
  return DependenceFamily::joint_mixture(m, m, WeightPair(WeightLaw::constant(1.0), WeightLaw::constant(1.0)),
                                         MixingFunction{1.0, 0.0, 0.0});
}

McOptions options(std::size_t samples, std::uint64_t seed, std::size_t workers = 1,
                  EstimatorKind kind = EstimatorKind::conditional) {
  McOptions o;
  o.samples = samples;
  o.seed = seed;
  o.workers = workers;
  o.kind = kind;
  return o;
}

double rel_err(double v, double target) { return std::abs(v / target - 1.0); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto fam = DependenceFamily::marginal_tilt(kPareto2, kPareto2, unit_uniform_pair(), 0.5, 0.0);
  const double constant = breiman_constant(fam.weights().theta(), [&](double t) { return fam.h1(t); }, 2.0);
  const auto e = estimate_marginal_sum_tail(FamilySequence::iid(fam, 1), Side::first, 1.0, 1e5,
                                            options(200000, 0xb1));
  const double secs = seconds_since(t0);
  const bool ok = std::abs(constant - 5.0 / 3.0) < 1e-10 && rel_err(e.point, 5.0 / 3.0) < 0.02 && secs < 60;
  return {ok, fmt::format("constant {:.12f} (5/3), x=1e5 estimate {:.5f} +- {:.5f}, rel err {:.4f}, {:.1f}s",
                          constant, e.point, e.std_error, rel_err(e.point, 5.0 / 3.0), secs)};
}

Estimate corner_estimate(std::size_t workers) {
  return estimate_scaled_corner(third_config(), 1.0, 1.0, 1e4, options(1000000, 0xc0ffee, workers));
}

Outcome criterion_2() {
  const auto t0 = std::chrono::steady_clock::now();
  const double limit = corner_mass_product(third_config(), 1.0, 1.0);
  const auto e = corner_estimate(1);
  const double secs = seconds_since(t0);
  const bool ok = std::abs(limit - 1.0 / 3.0) < 1e-10 && std::abs(e.point - 1.0 / 3.0) < 3.0 * e.std_error &&
                  rel_err(e.point, 1.0 / 3.0) < 0.05 && secs < 60;
  return {ok, fmt::format("limit {:.12f}, x=1e4 estimate {:.6f} +- {:.6f} ({:.2f} se), {:.1f}s", limit, e.point,
                          e.std_error, (e.point - 1.0 / 3.0) / e.std_error, secs)};
}

Outcome criterion_3() {
  const auto fam = third_config();
  const double box = mu_hat_product_box(fam, 1.0, 1.0);
  const auto sums = estimate_sum_tails(PathSource::fixed(FamilySequence::iid(fam, 1)), 1.0, 1.0, 1e4,
                                       options(1000000, 0xb0c5));
  const double by_parts = sums.first.point + sums.second.point - sums.corner.point;
  double worst = 0.0;
  for (double lambda : {1e-3, 0.1, 0.5, 2.0, 7.0, 1e3}) {
    const double scaled = mu_hat_product_box(fam, std::sqrt(lambda), std::sqrt(lambda)) * lambda;
    worst = std::max(worst, std::abs(scaled / box - 1.0));
  }
  const bool ok = std::abs(box - 7.0 / 3.0) < 1e-10 && rel_err(by_parts, 7.0 / 3.0) < 0.05 && worst <= 1e-12;
  return {ok, fmt::format("closed form {:.12f}, first+second-corner at x=1e4 {:.5f}, rel err {:.4f}, "
                          "homogeneity max dev {:.2e}",
                          box, by_parts, rel_err(by_parts, 7.0 / 3.0), worst)};
}

Outcome criterion_4() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto seq = FamilySequence::iid(third_config(), 3);
  const double limit = sum_corner_mass(seq, 1.0, 1.0);
  const auto e = estimate_scaled_sum_corner(seq, 1.0, 1.0, 1e3, options(10000000, 0x4a, 1, EstimatorKind::plain));
  const double secs = seconds_since(t0);
  const bool ok = rel_err(e.point, limit) < 0.10 && secs < 300;
  return {ok, fmt::format("limit {:.6f}, plain estimate x=1e3 {:.5f} +- {:.5f}, rel err {:.4f}, {:.1f}s", limit,
                          e.point, e.std_error, rel_err(e.point, limit), secs)};
}

Outcome criterion_5() {
  const auto fam = third_config();
  const auto n = StoppingLaw::uniform(1, 3);
  const double single = corner_mass_product(fam, 1.0, 1.0);
  // E[N] times the n = 1 corner, checked on several laws
  bool linear = true;
  for (const auto& law : {n, StoppingLaw({{1, 0.25}, {4, 0.75}}), StoppingLaw::constant(5)}) {
    const double tilde = mu_tilde_stopped_box(fam, law, 1.0, 1.0);
    linear = linear && std::abs(tilde - law.mean() * mu_hat_product_box(fam, 1.0, 1.0)) <= 1e-12 * tilde;
  }
  const double target = n.mean() * single;
  const auto sums = estimate_stopped_sum_tails(fam, n, 1.0, 1.0, 1e3, options(1000000, 0x57));
  const auto& e = sums.corner;
  const double z = (e.point - target) / e.std_error;
  const bool ok = linear && std::abs(z) < 3.0;
  return {ok, fmt::format("target {:.6f}, stopped corner x=1e3 {:.5f} +- {:.5f} ({:.1f} se), linearity {}", target,
                          e.point, e.std_error, z, linear ? "exact" : "broken")};
}

Outcome criterion_6() {
  const auto seq = FamilySequence::iid(third_config(), 1);
  const double limit = cr_limit(seq, 1.0, 1.0);
  const auto sums = estimate_sum_tails(PathSource::fixed(seq), 1.0, 1.0, 1e4, options(1000000, 0xc7));
  const auto& e = sums.corner_given_second;
  const bool ok = std::abs(limit - 0.25) < 1e-10 && rel_err(e.point, limit) < 0.10;
  return {ok, fmt::format("limit {:.12f}, conditional frequency x=1e4 {:.5f} +- {:.5f}", limit, e.point,
                          e.std_error)};
}

// Zero-premium comonotone model over three periods, capital split evenly.
const std::size_t kRuinHorizon = 3;

RuinEstimates ruin_estimates(double x, std::size_t workers) {
  return estimate_ruin({}, FamilySequence::iid(comonotone(2.0), kRuinHorizon), x, 0.5, 0.5,
                       options(400000, 0x7, workers));
}

Outcome criterion_7() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto seq = FamilySequence::iid(comonotone(2.0), kRuinHorizon);
  bool ok = true;
  std::string detail;
  double prev_dev = 0.0;
  bool first = true;
  for (double x : {1e2, 1e3, 1e4}) {
    const auto r = ruin_estimates(x, 1);
    const double asym = ruin_asymptote(seq, 0.5, 0.5, x).and_sim;
    const double ratio = r.and_ruin.point / asym;
    const double ratio_se = r.and_ruin.std_error / asym;
    const double dev = std::abs(ratio - 1.0);
    if (!first && dev > prev_dev + 2.0 * ratio_se) ok = false;
    detail += fmt::format("x={:g} and/asym {:.4f} +- {:.4f}; ", x, ratio, ratio_se);
    if (x == 1e4) {
      const double and_sim = r.and_ruin.point / r.sim_ruin.point;
      ok = ok && and_sim >= 0.9 && and_sim <= 1.1;
      ok = ok && rel_err(r.and_ruin.point, asym) <= 0.2 && rel_err(r.sim_ruin.point, asym) <= 0.2;
      detail += fmt::format("and/sim {:.4f}; ", and_sim);
    }
    prev_dev = dev;
    first = false;
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 300;
  return {ok, detail + fmt::format("{:.1f}s", secs)};
}

Outcome criterion_8() {
  const auto seq = FamilySequence::iid(comonotone(2.0), kRuinHorizon);
  const auto asym = ruin_asymptote(seq, 0.5, 0.5, 1e4);
  const auto r = ruin_estimates(1e4, 1);
  const double ratio = r.or_ruin.point / asym.or_value;
  const bool ok = ratio >= 0.8 && ratio <= 1.2;
  return {ok, fmt::format("or coefficient {:.6f}, psi_or x=1e4 {:.4e}, ratio {:.4f}", asym.or_coefficient,
                          r.or_ruin.point, ratio)};
}

Outcome criterion_9() {
  const RvMarginal m(2.0, 0.5);
  const auto fam = DependenceFamily::joint_mixture(m, m, unit_uniform_pair(), MixingFunction{0.5, 0.0, 0.0});
  const auto seq = FamilySequence::iid(fam, 3);
  const NetLossModel premium{1.0, 1.0};
  const auto g2 = positive_part_gap(premium, seq, 1e2, 0.5, 0.5, options(200000, 0x9));
  const auto g3 = positive_part_gap(premium, seq, 1e3, 0.5, 0.5, options(200000, 0x9));
  const bool ok = g3.point >= g2.point && g3.point >= 0.8;
  return {ok, fmt::format("gap x=1e2 {:.5f} +- {:.5f}, x=1e3 {:.5f} +- {:.5f}", g2.point, g2.std_error, g3.point,
                          g3.std_error)};
}

Outcome criterion_10() {
  const auto e2 = jes_empirical(comonotone(2.0), 1e4, options(200000, 0x1e5));
  const auto e3 = jes_empirical(comonotone(3.0), 1e4, options(200000, 0x1e6));
  double worst = 0.0;
  for (double alpha : {1.5, 2.0, 3.0, 5.0}) {
    worst = std::max(worst, std::abs(jes_factor(comonotone(alpha)) - alpha / (alpha - 1.0)));
  }
  const bool ok = rel_err(e2.factor.point, 2.0) < 0.05 && rel_err(e3.factor.point, 1.5) < 0.05 && worst <= 1e-8;
  return {ok, fmt::format("alpha=2 {:.5f} +- {:.5f}, alpha=3 {:.5f} +- {:.5f}, quadrature max dev {:.2e}",
                          e2.factor.point, e2.factor.std_error, e3.factor.point, e3.factor.std_error, worst)};
}

WeightLaw random_law(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (u(gen) < 0.6) {
    const double lo = u(gen) < 0.3 ? 0.0 : 2.0 * u(gen);
    return WeightLaw::uniform(lo, lo + 0.1 + 3.0 * u(gen));
  }
  const int k = 1 + static_cast<int>(4.0 * u(gen));
  std::vector<WeightLaw::Atom> atoms;
  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    atoms.push_back({0.1 + i + u(gen), 0.1 + u(gen)});
    total += atoms.back().prob;
  }
  for (auto& a : atoms) a.prob /= total;
  double drift = 1.0;
  for (const auto& a : atoms) drift -= a.prob;
  atoms.back().prob += drift;
  return WeightLaw::discrete(atoms);
}

Outcome criterion_11() {
  std::mt19937_64 gen(0x11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  int built = 0;
  for (int i = 0; i < 100; ++i) {
    const RvMarginal mx(1.1 + 3.0 * u(gen), 0.5 + u(gen));
    const RvMarginal my(1.1 + 3.0 * u(gen), 0.5 + u(gen));
    const auto coupling = u(gen) < 0.5 ? WeightCoupling::independent : WeightCoupling::comonotone;
    const WeightPair w(random_law(gen), random_law(gen), coupling);
    const int variant = i % 3;
    DependenceFamily fam = [&] {
      if (variant == 0) return DependenceFamily::independence(mx, my, w, u(gen));
      if (variant == 1) return DependenceFamily::marginal_tilt(mx, my, w, 2.0 * u(gen) - 1.0, 2.0 * u(gen) - 1.0);
      const double base = 0.05 + 0.45 * u(gen);
      const double room = (1.0 - base) / 2.0;
      return DependenceFamily::joint_mixture(mx, my, w,
                                             MixingFunction{base, room * u(gen) / w.theta().hi(),
                                                            room * u(gen) / w.delta().hi()});
    }();
    ++built;
    const double e1 = w.theta().expect([&](double t) { return fam.h1(t); });
    const double e2 = w.delta().expect([&](double d) { return fam.h2(d); });
    const double eg = w.expect([&](double t, double d) { return fam.g(t, d); });
    worst = std::max({worst, std::abs(e1 - 1.0), std::abs(e2 - 1.0), std::abs(eg - 1.0)});
  }
  const bool ok = built == 100 && worst <= 1e-10;
  return {ok, fmt::format("{} families, max |E[factor] - 1| = {:.2e}", built, worst)};
}

bool same_bits(const Estimate& a, const Estimate& b) {
  return std::memcmp(&a.point, &b.point, sizeof(double)) == 0 &&
         std::memcmp(&a.std_error, &b.std_error, sizeof(double)) == 0;
}

Outcome criterion_12() {
  const auto c1 = corner_estimate(1);
  const auto r1 = ruin_estimates(1e4, 1);
  bool ok = true;
  for (std::size_t workers : {4u, 8u}) {
    const auto c = corner_estimate(workers);
    const auto r = ruin_estimates(1e4, workers);
    ok = ok && same_bits(c, c1) && same_bits(r.and_ruin, r1.and_ruin) && same_bits(r.sim_ruin, r1.sim_ruin) &&
         same_bits(r.or_ruin, r1.or_ruin);
  }
  return {ok, fmt::format("corner {:.17g}, psi_and {:.17g} across workers 1, 4, 8", c1.point, r1.and_ruin.point)};
}

const std::vector<std::function<Outcome()>> kCriteria{
    criterion_1, criterion_2, criterion_3, criterion_4,  criterion_5,  criterion_6,
    criterion_7, criterion_8, criterion_9, criterion_10, criterion_11, criterion_12};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"brvlab acceptance suite"};
  std::vector<int> selected;
  app.add_option("--criterion", selected, "criterion numbers to run (default: all)")
      ->check(CLI::Range(1, static_cast<int>(kCriteria.size())));
  CLI11_PARSE(app, argc, argv);
  if (selected.empty()) {
    for (int i = 1; i <= static_cast<int>(kCriteria.size()); ++i) selected.push_back(i);
  }
  int failures = 0;
  for (int n : selected) {
    Outcome out;
    try {
      out = kCriteria[static_cast<std::size_t>(n - 1)]();
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    std::printf("%s criterion %d: %s\n", out.pass ? "PASS" : "FAIL", n, out.detail.c_str());
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
