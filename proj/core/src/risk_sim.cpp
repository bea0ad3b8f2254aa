#include "brvlab/risk_sim.hpp"

#include <cmath>

#include "brvlab/error.hpp"

namespace brvlab {

namespace {

void check_split(double x, double p, double q) {
  if (!(p > 0.0) || !(q > 0.0) || std::abs(p + q - 1.0) > 1e-12) {
    throw DomainError("capital split needs p, q > 0 and p + q = 1");
  }
  if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("capital x must be finite and >= 0");
}

}  // namespace

const char* to_string(RuinKind k) noexcept {
  switch (k) {
    case RuinKind::and_ruin:
      return "and";
    case RuinKind::sim_ruin:
      return "sim";
    case RuinKind::or_ruin:
      return "or";
  }
  return "?";
}

std::vector<RuinIndicators> simulate_paths(const NetLossModel& model, const FamilySequence& seq,
                                           double x, double p, double q, std::size_t n_paths,
                                           std::uint64_t seed) {
  check_split(x, p, q);
  const PathSource source = PathSource::fixed(seq);
  const PathModel pm = model.path_model();
  const double a = p * x;
  const double b = q * x;
  std::vector<RuinIndicators> out;
  out.reserve(n_paths);
  const std::size_t block = McOptions{}.block_size;
  Path path;
  for (std::size_t blk = 0; out.size() < n_paths; ++blk) {
    PathSampler sampler(source, StreamSpec{seed, blk});
    for (std::size_t s = 0; s < block && out.size() < n_paths; ++s) {
      sampler.next(path);
      RuinIndicators r;
      r.and_ruin = path_indicator(PathEvent::ruin_and, path, a, b, pm);
      r.sim_ruin = path_indicator(PathEvent::ruin_sim, path, a, b, pm);
      r.or_ruin = path_indicator(PathEvent::ruin_or, path, a, b, pm);
      r.first_ruin = path_indicator(PathEvent::ruin_or, path, a, kInfinity, pm);
      r.second_ruin = path_indicator(PathEvent::ruin_or, path, kInfinity, b, pm);
      out.push_back(r);
    }
  }
  return out;
}

RuinEstimates estimate_ruin(const NetLossModel& model, const FamilySequence& seq, double x,
                            double p, double q, const McOptions& opts) {
  check_split(x, p, q);
  const PathModel pm = model.path_model();
  const double a = p * x;
  const double b = q * x;
  const EventQuery queries[] = {
      {PathEvent::ruin_and, a, b, pm},
      {PathEvent::ruin_sim, a, b, pm},
      {PathEvent::ruin_or, a, b, pm},
      {PathEvent::ruin_or, a, kInfinity, pm},
      {PathEvent::ruin_or, kInfinity, b, pm},
  };
  const auto acc = simulate_events(PathSource::fixed(seq), queries, opts);
  RuinEstimates r;
  r.and_ruin = acc.estimate(0);
  r.sim_ruin = acc.estimate(1);
  r.or_ruin = acc.estimate(2);
  r.first = acc.estimate(3);
  r.second = acc.estimate(4);
  const double parts[] = {-1.0, 0.0, 0.0, 1.0, 1.0};
  r.or_by_parts = acc.linear(parts);
  r.and_over_sim = acc.ratio(0, 1);
  if (opts.kind == EstimatorKind::plain) {
    for (Estimate* e : {&r.and_ruin, &r.sim_ruin, &r.or_ruin, &r.first, &r.second}) {
      if (e->hits < kMinReliableHits) e->warning = "fewer than 50 ruin paths; interval unreliable";
    }
  }
  return r;
}

RuinResult estimate_psi(RuinKind kind, const NetLossModel& model, const FamilySequence& seq,
                        double x, double p, double q, const McOptions& opts) {
  check_split(x, p, q);
  PathEvent ev = PathEvent::ruin_and;
  if (kind == RuinKind::sim_ruin) ev = PathEvent::ruin_sim;
  if (kind == RuinKind::or_ruin) ev = PathEvent::ruin_or;
  const EventQuery query{ev, p * x, q * x, model.path_model()};
  const auto acc = simulate_events(PathSource::fixed(seq), std::span(&query, 1), opts);
  RuinResult r{kind, acc.estimate(0), x, p, q, seq.size()};
  if (opts.kind == EstimatorKind::plain && r.estimate.hits < kMinReliableHits) {
    r.estimate.warning = "fewer than 50 ruin paths; interval unreliable";
  }
  return r;
}

Estimate positive_part_gap(const NetLossModel& model, const FamilySequence& seq, double x,
                           double p, double q, const McOptions& opts) {
  check_split(x, p, q);
  const EventQuery queries[] = {
      {PathEvent::corner, p * x, q * x, model.path_model(false)},
      {PathEvent::corner, p * x, q * x, model.path_model(true)},
  };
  const auto acc = simulate_events(PathSource::fixed(seq), queries, opts);
  return acc.ratio(0, 1);
}

std::pair<double, double> sample_stopped_sums(const DependenceFamily& fam,
                                              const StoppingLaw& stopping, const StreamSpec& spec) {
  const PathSource source = PathSource::stopped(fam, stopping);
  PathSampler sampler(source, spec);
  Path path;
  sampler.next(path);
  double s = 0.0;
  double t = 0.0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    s += path.theta[i] * path.x[i];
    t += path.delta[i] * path.y[i];
  }
  return {s, t};
}

SumTailEstimates estimate_stopped_sum_tails(const DependenceFamily& fam,
                                            const StoppingLaw& stopping, double p, double q,
                                            double x, const McOptions& opts) {
  return estimate_sum_tails(PathSource::stopped(fam, stopping), p, q, x, opts);
}

JesEstimate jes_empirical(const DependenceFamily& fam, double x, const McOptions& opts) {
  if (!(fam.marginal_x().alpha() > 1.0)) {
    throw AssumptionViolation("joint expected shortfall needs alpha > 1");
  }
  if (!(corner_mass_product(fam, 1.0, 1.0) > 0.0)) {
    throw AssumptionViolation("joint expected shortfall needs a positive corner mass");
  }
  if (!(x >= 1.0)) throw DomainError("scale x must be >= 1");
  const double ua = fam.marginal_x().normalization(x);
  const double ub = fam.marginal_y().normalization(x);
  const auto& fx = fam.marginal_x();
  const auto& fy = fam.marginal_y();
  const bool plain = opts.kind == EstimatorKind::plain;

  // Columns: Theta X on the event, event, event on the independent branch.
  const auto acc = run_blocks(3, opts, [&](const StreamSpec& spec, std::size_t count,
                                           MomentAccumulator& m) {
    RngStream rng = spec.open(index_salt(0));
    double v[3];
    for (std::size_t s = 0; s < count; ++s) {
      const auto d = fam.sample(rng);
      if (plain) {
        const bool hit = d.theta * d.x > ua && d.delta * d.y > ub;
        v[0] = hit ? d.theta * d.x : 0.0;
        v[1] = hit ? 1.0 : 0.0;
        v[2] = hit && d.branch == Branch::independent ? 1.0 : 0.0;
      } else {
        const double a = ua / d.theta;
        const double b = ub / d.delta;
        v[0] = d.theta == 0.0 ? 0.0 : d.theta * fam.conditional_upper_moment_x(d.theta, d.delta, a, b);
        v[1] = fam.conditional_joint_survival(d.theta, d.delta, a, b);
        const double w = fam.mixing_weight(d.theta, d.delta);
        v[2] = fam.variant() == Variant::marginal_tilt
                   ? v[1]
                   : (1.0 - w) * fx.survival(a) * fy.survival(b);
      }
      m.add(v);
    }
  });
  JesEstimate r;
  r.factor = acc.ratio(0, 1, 1.0 / ua);
  r.independent_share = acc.ratio(2, 1);
  if (plain && acc.hits(1) < kMinReliableHits) {
    r.factor.warning = "fewer than 50 joint exceedances; interval unreliable";
  }
  return r;
}

}  // namespace brvlab
