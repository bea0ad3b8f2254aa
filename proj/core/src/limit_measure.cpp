#include "brvlab/limit_measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "brvlab/error.hpp"
#include "brvlab/quadrature.hpp"

namespace brvlab {

namespace {

void require_positive_box(double p, double q) {
  if (!(p > 0.0) || !(q > 0.0) || !std::isfinite(p) || !std::isfinite(q)) {
    throw DomainError("box corner (p, q) must be finite and > 0");
  }
}

// P[W > s] for a weight law.
double weight_survival(const WeightLaw& law, double s) {
  return 1.0 - law.cdf(s);
}

}  // namespace

LimitMeasureSpec LimitMeasureSpec::of(const DependenceFamily& fam) {
  return {fam.marginal_x().alpha(), fam.marginal_y().alpha(), fam.tail_weight()};
}

double mu_bar(const LimitMeasureSpec& spec, double x, double y) {
  if (!(x > 0.0) || !(y > 0.0)) throw DomainError("mu_bar needs x > 0 and y > 0");
  if (spec.w_bar == 0.0) return 0.0;
  return spec.w_bar * std::min(std::pow(x, -spec.alpha), std::pow(y, -spec.beta));
}

double corner_mass_product(const DependenceFamily& fam, double p, double q) {
  require_positive_box(p, q);
  const double wb = fam.tail_weight();
  if (wb == 0.0) return 0.0;
  const double alpha = fam.marginal_x().alpha();
  const double beta = fam.marginal_y().alpha();
  // (theta/p)^alpha = (delta/q)^beta  <=>  delta = q p^(-alpha/beta) theta^(alpha/beta)
  const PowerCurve kink{q * std::pow(p, -alpha / beta), alpha / beta};
  const double pa = std::pow(p, -alpha);
  const double qb = std::pow(q, -beta);
  const double m = fam.weights().expect(
      [&](double t, double d) {
        return fam.g(t, d) * std::min(pa * std::pow(t, alpha), qb * std::pow(d, beta));
      },
      kink);
  return wb * m;
}

double marginal_mass_x(const DependenceFamily& fam, double p) {
  require_positive_box(p, 1.0);
  const double alpha = fam.marginal_x().alpha();
  return fam.tilted_moment_x(alpha) * std::pow(p, -alpha);
}

double marginal_mass_y(const DependenceFamily& fam, double q) {
  require_positive_box(1.0, q);
  const double beta = fam.marginal_y().alpha();
  return fam.tilted_moment_y(beta) * std::pow(q, -beta);
}

double mu_hat_product_box(const DependenceFamily& fam, double p, double q) {
  return marginal_mass_x(fam, p) + marginal_mass_y(fam, q) - corner_mass_product(fam, p, q);
}

double corner_mass_independent_weights(const DependenceFamily& fam, double p, double q) {
  require_positive_box(p, q);
  if (fam.variant() == Variant::marginal_tilt && (fam.a1() != 0.0 || fam.a2() != 0.0)) {
    throw AssumptionViolation("independent-weights formula needs h1 = h2 = g = 1");
  }
  if (fam.variant() == Variant::joint_mixture &&
      (fam.mixing().theta_slope != 0.0 || fam.mixing().delta_slope != 0.0)) {
    throw AssumptionViolation("independent-weights formula needs h1 = h2 = g = 1");
  }
  if (fam.weights().coupling() != WeightCoupling::independent) {
    throw AssumptionViolation("independent-weights formula needs independently drawn weights");
  }
  const double wb = fam.tail_weight();
  if (wb == 0.0) return 0.0;
  const double alpha = fam.marginal_x().alpha();
  const double beta = fam.marginal_y().alpha();
  const auto& th = fam.weights().theta();
  const auto& de = fam.weights().delta();
  // int_0^inf P[A > t] P[B > t] dt for A = (Theta/p)^alpha, B = (Delta/q)^beta,
  // with t = tau^m, m = max(alpha, beta), so both tails are smooth in tau.
  const double m = std::max(alpha, beta);
  auto integrand = [&](double tau) {
    const double ta = weight_survival(th, p * std::pow(tau, m / alpha));
    const double tb = weight_survival(de, q * std::pow(tau, m / beta));
    return ta * tb * m * std::pow(tau, m - 1.0);
  };
  const double top = std::min(std::pow(th.hi() / p, alpha / m), std::pow(de.hi() / q, beta / m));
  std::vector<double> cuts{0.0, top};
  for (const auto* law : {&th, &de}) {
    if (law->kind() != WeightLaw::Kind::discrete) continue;
    const double sc = law == &th ? p : q;
    const double ex = law == &th ? alpha / m : beta / m;
    for (const auto& a : law->atoms()) {
      const double c = std::pow(a.value / sc, ex);
      if (c > 0.0 && c < top) cuts.push_back(c);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) s += integrate(integrand, cuts[i], cuts[i + 1]);
  return wb * s;
}

double mu_hat_product_box_independent_weights(const DependenceFamily& fam, double p, double q) {
  const double alpha = fam.marginal_x().alpha();
  const double beta = fam.marginal_y().alpha();
  return fam.weights().theta().moment(alpha) * std::pow(p, -alpha) +
         fam.weights().delta().moment(beta) * std::pow(q, -beta) -
         corner_mass_independent_weights(fam, p, q);
}

double sum_corner_mass(const FamilySequence& seq, double p, double q) {
  double s = 0.0;
  for (const auto& f : seq) s += corner_mass_product(f, p, q);
  return s;
}

double sum_marginal_mass_x(const FamilySequence& seq, double p) {
  double s = 0.0;
  for (const auto& f : seq) s += marginal_mass_x(f, p);
  return s;
}

double sum_marginal_mass_y(const FamilySequence& seq, double q) {
  double s = 0.0;
  for (const auto& f : seq) s += marginal_mass_y(f, q);
  return s;
}

double mu_hat_sum_box(const FamilySequence& seq, double p, double q) {
  double s = 0.0;
  for (const auto& f : seq) s += mu_hat_product_box(f, p, q);
  return s;
}

StoppingLaw::StoppingLaw(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw DomainError("stopping law needs at least one atom");
  std::sort(atoms_.begin(), atoms_.end(),
            [](const Atom& a, const Atom& b) { return a.value < b.value; });
  double total = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (!(atoms_[i].prob > 0.0)) throw DomainError("stopping law probabilities must be > 0");
    if (i > 0 && atoms_[i].value == atoms_[i - 1].value) {
      throw DomainError("stopping law atoms must be distinct");
    }
    total += atoms_[i].prob;
  }
  if (std::abs(total - 1.0) > 1e-9) throw DomainError("stopping law probabilities must sum to 1");
  if (atoms_.back().value == 0) {
    throw AssumptionViolation("stopping count N must not be degenerate at 0");
  }
  double c = 0.0;
  for (auto& a : atoms_) {
    a.prob /= total;
    c += a.prob;
    cumulative_.push_back(c);
  }
  cumulative_.back() = 1.0;
}

StoppingLaw StoppingLaw::uniform(std::size_t lo, std::size_t hi) {
  if (lo > hi) throw DomainError("uniform stopping law needs lo <= hi");
  std::vector<Atom> atoms;
  const double p = 1.0 / static_cast<double>(hi - lo + 1);
  for (std::size_t k = lo; k <= hi; ++k) atoms.push_back({k, p});
  return StoppingLaw(std::move(atoms));
}

double StoppingLaw::mean() const noexcept {
  double m = 0.0;
  for (const auto& a : atoms_) m += a.prob * static_cast<double>(a.value);
  return m;
}

std::size_t StoppingLaw::sample(RngStream& rng) const {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  return atoms_[static_cast<std::size_t>(it - cumulative_.begin())].value;
}

double mu_tilde_stopped_box(const DependenceFamily& fam, const StoppingLaw& n, double p, double q) {
  return n.mean() * mu_hat_product_box(fam, p, q);
}

}  // namespace brvlab
