#include "brvlab/experiment.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>

#include <fmt/format.h>

#include "brvlab/asymptotics.hpp"
#include "brvlab/error.hpp"
#include "brvlab/limit_measure.hpp"
#include "brvlab/mc_engine.hpp"
#include "brvlab/risk_sim.hpp"
#include "brvlab/version.hpp"
#include "json.hpp"

namespace brvlab {

namespace {

using nlohmann::json;

ResultRow make_row(double x, const Estimate& e, double asymptote) {
  ResultRow r;
  r.x = x;
  r.empirical = e.point;
  r.std_error = e.std_error;
  r.ci_lo = e.ci_lo;
  r.ci_hi = e.ci_hi;
  r.asymptote = asymptote;
  r.ratio = asymptote != 0.0 ? e.point / asymptote : std::numeric_limits<double>::quiet_NaN();
  r.warning = e.warning;
  return r;
}

McOptions mc_options(const ExperimentConfig& c) {
  McOptions o;
  o.samples = c.budget;
  o.seed = c.seed;
  o.workers = c.workers;
  o.kind = c.estimator;
  return o;
}

const Estimate& pick(const SumTailEstimates& s, Functional f) {
  switch (f) {
    case Functional::first:
      return s.first;
    case Functional::second:
      return s.second;
    case Functional::corner:
      return s.corner;
    case Functional::box:
      return s.box;
  }
  return s.corner;
}

double sum_asymptote(const FamilySequence& seq, Functional f, double p, double q) {
  switch (f) {
    case Functional::first:
      return sum_marginal_mass_x(seq, p);
    case Functional::second:
      return sum_marginal_mass_y(seq, q);
    case Functional::corner:
      return sum_corner_mass(seq, p, q);
    case Functional::box:
      return mu_hat_sum_box(seq, p, q);
  }
  return 0.0;
}

void check_tolerances(const ExperimentConfig& c, ExperimentResult& r) {
  if (r.rows.empty()) return;
  const std::size_t first = c.tolerance.rows == "all" ? 0 : r.rows.size() - 1;
  for (std::size_t i = first; i < r.rows.size(); ++i) {
    const auto& row = r.rows[i];
    const double diff = std::abs(row.empirical - row.asymptote);
    if (c.tolerance.relative) {
      // A zero asymptote turns the relative bound into an absolute one.
      const double scale = row.asymptote != 0.0 ? std::abs(row.asymptote) : 1.0;
      if (!(diff <= *c.tolerance.relative * scale)) {
        r.failures.push_back(fmt::format("x={:g}: |{:.6g} - {:.6g}| exceeds relative tolerance {:g}",
                                         row.x, row.empirical, row.asymptote,
                                         *c.tolerance.relative));
      }
    }
    if (c.tolerance.stderr_multiple) {
      const double slack = 4.0 * std::numeric_limits<double>::epsilon() * std::abs(row.asymptote);
      if (!(diff <= *c.tolerance.stderr_multiple * row.std_error + slack)) {
        r.failures.push_back(fmt::format("x={:g}: |{:.6g} - {:.6g}| exceeds {:g} stderr ({:.3g})",
                                         row.x, row.empirical, row.asymptote,
                                         *c.tolerance.stderr_multiple, row.std_error));
      }
    }
  }
  r.pass = r.failures.empty();
}

ExperimentResult run_verify(const ExperimentConfig& c) {
  const auto fam = c.family.build();
  const auto rep = verify_assumptions(fam, c.budget, c.x_grid, c.epsilon, c.seed);
  ExperimentResult r;
  json checks = json::array();
  for (const auto& ch : rep.checks) {
    Estimate e = Estimate::from(ch.empirical, ch.std_error, ch.conditioning_count, ch.hits);
    r.rows.push_back(make_row(ch.x, e, ch.expected));
    checks.push_back({{"factor", ch.factor},
                      {"theta", ch.theta},
                      {"delta", ch.delta},
                      {"x", ch.x},
                      {"flagged", ch.flagged}});
  }
  json d{{"mean_h1", rep.mean_h1},
         {"mean_h2", rep.mean_h2},
         {"mean_g", rep.mean_g},
         {"mean_one_ok", rep.mean_one_ok},
         {"moment_margin_x", rep.moment_margin_x},
         {"moment_margin_y", rep.moment_margin_y},
         {"hill_x", rep.hill_x},
         {"hill_y", rep.hill_y},
         {"checks", checks}};
  r.diagnostics_json = d.dump();
  if (!rep.mean_one_ok) r.failures.push_back("mean-one quadrature check failed");
  for (const auto& ch : rep.checks) {
    if (ch.flagged) {
      r.failures.push_back(fmt::format("{} at ({:g}, {:g}), x={:g}: ratio {:.4g} vs {:.4g}",
                                       ch.factor, ch.theta, ch.delta, ch.x, ch.empirical,
                                       ch.expected));
    }
  }
  r.pass = r.failures.empty();
  return r;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& c) {
  if (c.kind == ExperimentKind::verify_assumptions) return run_verify(c);

  const McOptions opts = mc_options(c);
  ExperimentResult r;
  json diag = json::array();
  const auto seq = c.sequence();

  for (double x : c.x_grid) {
    switch (c.kind) {
      case ExperimentKind::breiman: {
        const bool second = c.functional == Functional::second;
        double asym = 0.0;
        for (const auto& f : seq) {
          asym += second ? breiman_constant(f.weights().delta(), [&](double d) { return f.h2(d); },
                                            f.marginal_y().alpha()) *
                               std::pow(c.q, -f.marginal_y().alpha())
                         : breiman_constant(f.weights().theta(), [&](double t) { return f.h1(t); },
                                            f.marginal_x().alpha()) *
                               std::pow(c.p, -f.marginal_x().alpha());
        }
        const auto e = estimate_marginal_sum_tail(seq, second ? Side::second : Side::first,
                                                  second ? c.q : c.p, x, opts);
        r.rows.push_back(make_row(x, e, asym));
        break;
      }
      case ExperimentKind::product_corner: {
        const auto one = FamilySequence::iid(seq.front(), 1);
        if (c.functional == Functional::corner) {
          const auto e = estimate_scaled_corner(seq.front(), c.p, c.q, x, opts);
          r.rows.push_back(make_row(x, e, corner_mass_product(seq.front(), c.p, c.q)));
        } else {
          const auto s = estimate_sum_tails(PathSource::fixed(one), c.p, c.q, x, opts);
          r.rows.push_back(make_row(x, pick(s, c.functional), sum_asymptote(one, c.functional, c.p, c.q)));
        }
        break;
      }
      case ExperimentKind::sum_measure: {
        const auto s = estimate_sum_tails(PathSource::fixed(seq), c.p, c.q, x, opts);
        r.rows.push_back(make_row(x, pick(s, c.functional), sum_asymptote(seq, c.functional, c.p, c.q)));
        break;
      }
      case ExperimentKind::stopped_sum: {
        const auto n = c.stopping_law();
        const auto& fam = seq.front();
        const auto s = estimate_stopped_sum_tails(fam, n, c.p, c.q, x, opts);
        const double asym = c.functional == Functional::box
                                ? mu_tilde_stopped_box(fam, n, c.p, c.q)
                                : n.mean() * sum_asymptote(FamilySequence::iid(fam, 1),
                                                           c.functional, c.p, c.q);
        r.rows.push_back(make_row(x, pick(s, c.functional), asym));
        break;
      }
      case ExperimentKind::ruin: {
        const NetLossModel model{c.ruin.premium_x, c.ruin.premium_y};
        if (c.ruin.functional == "positive-part-gap") {
          const auto e = positive_part_gap(model, seq, x, c.p, c.q, opts);
          r.rows.push_back(make_row(x, e, 1.0));
          break;
        }
        const auto asym = ruin_asymptote(seq, c.p, c.q, x);
        const auto est = estimate_ruin(model, seq, x, c.p, c.q, opts);
        const Estimate& e = c.ruin.kind == "and"   ? est.and_ruin
                            : c.ruin.kind == "sim" ? est.sim_ruin
                                                   : est.or_ruin;
        r.rows.push_back(make_row(x, e, c.ruin.kind == "or" ? asym.or_value : asym.and_sim));
        diag.push_back({{"x", x},
                        {"and", est.and_ruin.point},
                        {"sim", est.sim_ruin.point},
                        {"or", est.or_ruin.point},
                        {"or_by_parts", est.or_by_parts.point},
                        {"and_over_sim", est.and_over_sim.point},
                        {"degenerate_and_sim_limit", asym.degenerate}});
        break;
      }
      case ExperimentKind::jes: {
        const auto e = jes_empirical(seq.front(), x, opts);
        r.rows.push_back(make_row(x, e.factor, jes_factor(seq.front())));
        diag.push_back({{"x", x}, {"independent_share", e.independent_share.point}});
        break;
      }
      case ExperimentKind::cr: {
        const auto s = estimate_sum_tails(PathSource::fixed(seq), c.p, c.q, x, opts);
        r.rows.push_back(make_row(x, s.corner_given_second, cr_limit(seq, c.p, c.q)));
        break;
      }
      case ExperimentKind::verify_assumptions:
        break;
    }
  }
  r.diagnostics_json = diag.dump();
  check_tolerances(c, r);
  return r;
}

void write_outputs(const ExperimentConfig& c, const ExperimentResult& r,
                   const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream csv(dir / "results.csv", std::ios::binary);
    if (!csv) throw ConfigError(fmt::format("cannot write to '{}'", dir.string()));
    csv << "x,empirical,stderr,ci_lo,ci_hi,asymptote,ratio\n";
    for (const auto& row : r.rows) {
      csv << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", row.x,
                         row.empirical, row.std_error, row.ci_lo, row.ci_hi, row.asymptote,
                         row.ratio);
    }
  }
  json rows = json::array();
  for (const auto& row : r.rows) {
    json j{{"x", row.x},
           {"empirical", row.empirical},
           {"stderr", row.std_error},
           {"asymptote", row.asymptote}};
    j["ratio"] = std::isfinite(row.ratio) ? json(row.ratio) : json(nullptr);
    if (!row.warning.empty()) j["warning"] = row.warning;
    rows.push_back(j);
  }
  json summary{{"version", kVersion},
               {"experiment", to_string(c.kind)},
               {"config", json::parse(config_to_json(c))},
               {"rows", rows},
               {"pass", r.pass},
               {"failures", r.failures},
               {"diagnostics", json::parse(r.diagnostics_json)}};
  std::ofstream out(dir / "summary.json", std::ios::binary);
  if (!out) throw ConfigError(fmt::format("cannot write to '{}'", dir.string()));
  out << summary.dump(2) << "\n";
}

int run_from_file(const std::filesystem::path& config_path, const RunOverrides& ov) {
  try {
    ExperimentConfig cfg = load_config(config_path);
    if (ov.workers) cfg.workers = std::max<std::size_t>(1, *ov.workers);
    if (ov.output) cfg.output = *ov.output;
    if (ov.seed) cfg.seed = parse_seed(*ov.seed);
    const auto result = run_experiment(cfg);
    write_outputs(cfg, result, cfg.output);
    for (const auto& f : result.failures) std::cerr << "tolerance: " << f << "\n";
    return result.pass ? kExitOk : kExitTolerance;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const AssumptionViolation& e) {
    std::cerr << "assumption violation: " << e.what() << "\n";
    return kExitAssumption;
  } catch (const NumericFailure& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace brvlab
