#include "brvlab/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "brvlab/error.hpp"
#include "brvlab/limit_measure.hpp"
#include "brvlab/quadrature.hpp"

namespace brvlab {

namespace {

constexpr double kJesSplitCap = 100.0;
// Outer tolerance sits above the inner corner quadrature noise.
constexpr QuadratureTolerance kJesOuterTolerance{1e-9, 1e-8, 8};

// int_from^inf min(theta^alpha xi^-alpha, delta^beta) dxi, alpha > 1.
double jes_inner_tail(double theta, double delta, double alpha, double beta, double from) {
  if (theta <= 0.0 || delta <= 0.0) return 0.0;
  const double ta = std::pow(theta, alpha);
  const double crossing = theta * std::pow(delta, -beta / alpha);
  if (crossing <= from) return ta * std::pow(from, 1.0 - alpha) / (alpha - 1.0);
  return std::pow(delta, beta) * (crossing - from) +
         ta * std::pow(crossing, 1.0 - alpha) / (alpha - 1.0);
}

void require_jes_hypotheses(const DependenceFamily& fam) {
  if (!(fam.marginal_x().alpha() > 1.0)) {
    throw AssumptionViolation("JES limit needs alpha > 1 (the integral diverges otherwise)");
  }
}

// Expectation of w(theta, delta) * inner(theta, delta) with w = g * w_bar.
double weighted_expectation(const DependenceFamily& fam,
                            const std::function<double(double, double)>& inner,
                            const PowerCurve& kink) {
  const double wb = fam.tail_weight();
  return wb *
         fam.weights().expect([&](double t, double d) { return fam.g(t, d) * inner(t, d); }, kink);
}

}  // namespace

double breiman_constant(const WeightLaw& weight, const std::function<double(double)>& h,
                        double alpha) {
  if (!(alpha > 0.0)) throw DomainError("tail index must be > 0");
  return weight.expect([&](double t) { return std::pow(t, alpha) * h(t); });
}

double cr_limit(const FamilySequence& seq, double p, double q) {
  const double beta = seq.marginal_y().alpha();
  double den = 0.0;
  for (const auto& f : seq) den += f.tilted_moment_y(beta);
  if (!(den > 0.0)) throw DomainError("CR limit needs a positive denominator");
  return std::pow(q, beta) * sum_corner_mass(seq, p, q) / den;
}

RuinAsymptote ruin_asymptote(const FamilySequence& seq, double p, double q, double x) {
  const auto& v = seq.marginal_x();
  if (seq.marginal_x().alpha() != seq.marginal_y().alpha()) {
    throw AssumptionViolation("ruin asymptotics need alpha = beta (standard structure)");
  }
  if (!(seq.marginal_x() == seq.marginal_y())) {
    throw AssumptionViolation("ruin asymptotics need one shared claim marginal for both lines");
  }
  if (!(p > 0.0) || !(q > 0.0) || std::abs(p + q - 1.0) > 1e-12) {
    throw DomainError("capital split needs p, q > 0 and p + q = 1");
  }
  if (!(x > 0.0)) throw DomainError("capital x must be > 0");
  RuinAsymptote r;
  const double corner = sum_corner_mass(seq, p, q);
  r.and_sim_coefficient = corner;
  r.or_coefficient = sum_marginal_mass_x(seq, p) + sum_marginal_mass_y(seq, q) - corner;
  const double vbar = v.survival(x);
  r.and_sim = corner * vbar;
  r.or_value = r.or_coefficient * vbar;
  r.degenerate = corner == 0.0;
  return r;
}

double jes_factor(const DependenceFamily& fam) {
  require_jes_hypotheses(fam);
  const double base = corner_mass_product(fam, 1.0, 1.0);
  if (!(base > 0.0)) {
    throw AssumptionViolation("JES limit needs a positive corner mass at (1, 1)");
  }
  const double alpha = fam.marginal_x().alpha();
  const double beta = fam.marginal_y().alpha();
  const auto& th = fam.weights().theta();
  const auto& de = fam.weights().delta();

  // Past xi = theta_max / delta_min^(beta/alpha) the integrand is an exact power law;
  // the analytic tail below is exact from any split point.
  double split = kJesSplitCap;
  if (de.lo() > 0.0) {
    split = std::min(kJesSplitCap, 10.0 * std::max(1.0, th.hi() * std::pow(de.lo(), -beta / alpha)));
  }

  // corner(xi, 1) loses smoothness where the kink curve passes a support
  // endpoint or an atom of either weight.
  auto landmarks = [](const WeightLaw& law) {
    std::vector<double> v;
    if (law.kind() == WeightLaw::Kind::discrete) {
      for (const auto& a : law.atoms()) v.push_back(a.value);
    } else {
      v = {law.lo(), law.hi()};
    }
    return v;
  };
  std::vector<double> cuts{1.0, split};
  for (double t : landmarks(th)) {
    for (double d : landmarks(de)) {
      if (t <= 0.0 || d <= 0.0) continue;
      const double c = t * std::pow(d, -beta / alpha);
      if (c > 1.0 && c < split) cuts.push_back(c);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  double body = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    body += integrate([&](double xi) { return corner_mass_product(fam, xi, 1.0); }, cuts[i],
                      cuts[i + 1], kJesOuterTolerance);
  }
  // Inner integrand switches form where theta delta^(-beta/alpha) = split.
  const PowerCurve kink{std::pow(split, -alpha / beta), alpha / beta};
  const double tail = weighted_expectation(
      fam, [&](double t, double d) { return jes_inner_tail(t, d, alpha, beta, split); }, kink);
  return 1.0 + (body + tail) / base;
}

double jes_factor_fubini(const DependenceFamily& fam) {
  require_jes_hypotheses(fam);
  const double alpha = fam.marginal_x().alpha();
  const double beta = fam.marginal_y().alpha();
  const PowerCurve kink{1.0, alpha / beta};
  const double base = corner_mass_product(fam, 1.0, 1.0);
  if (!(base > 0.0)) {
    throw AssumptionViolation("JES limit needs a positive corner mass at (1, 1)");
  }
  const double all = weighted_expectation(
      fam, [&](double t, double d) { return jes_inner_tail(t, d, alpha, beta, 1.0); }, kink);
  return 1.0 + all / base;
}

}  // namespace brvlab
