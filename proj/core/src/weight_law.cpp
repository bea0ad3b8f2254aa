#include "brvlab/weight_law.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "brvlab/error.hpp"
#include "brvlab/quadrature.hpp"

namespace brvlab {

namespace {

constexpr double kAtomRelTol = 1e-12;
constexpr int kRootScanPoints = 64;
constexpr int kBisectionSteps = 80;

bool same_point(double a, double b) {
  return std::abs(a - b) <= kAtomRelTol * std::max(1.0, std::abs(b));
}

// Sorted interior points of (lo, hi) plus both ends.
std::vector<double> partition(double lo, double hi, std::vector<double> cuts) {
  std::vector<double> pts{lo};
  std::sort(cuts.begin(), cuts.end());
  for (double c : cuts) {
    if (std::isfinite(c) && c > pts.back() && c < hi) pts.push_back(c);
  }
  pts.push_back(hi);
  return pts;
}

}  // namespace

WeightLaw WeightLaw::uniform(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    throw AssumptionViolation("weight support must be bounded above (uniform bounds must be finite)");
  }
  if (!(lo >= 0.0) || !(lo < hi)) {
    throw DomainError("uniform weight law requires 0 <= lo < hi");
  }
  WeightLaw w;
  w.kind_ = Kind::uniform;
  w.lo_ = lo;
  w.hi_ = hi;
  return w;
}

WeightLaw WeightLaw::discrete(std::vector<Atom> atoms) {
  if (atoms.empty()) throw DomainError("discrete weight law needs at least one atom");
  double total = 0.0;
  for (const auto& a : atoms) {
    if (!std::isfinite(a.value)) {
      throw AssumptionViolation("weight support must be bounded above (atom is not finite)");
    }
    if (!(a.value > 0.0)) throw DomainError("weight atoms must be > 0");
    if (!(a.prob > 0.0)) throw DomainError("weight atom probabilities must be > 0");
    total += a.prob;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw DomainError("weight atom probabilities must sum to 1");
  }
  std::sort(atoms.begin(), atoms.end(), [](const Atom& x, const Atom& y) { return x.value < y.value; });
  for (std::size_t i = 1; i < atoms.size(); ++i) {
    if (same_point(atoms[i - 1].value, atoms[i].value)) {
      throw DomainError("weight atoms must be distinct");
    }
  }
  WeightLaw w;
  w.kind_ = Kind::discrete;
  for (auto& a : atoms) a.prob /= total;
  w.atoms_ = std::move(atoms);
  w.lo_ = w.atoms_.front().value;
  w.hi_ = w.atoms_.back().value;
  w.cumulative_.resize(w.atoms_.size());
  double c = 0.0;
  for (std::size_t i = 0; i < w.atoms_.size(); ++i) {
    c += w.atoms_[i].prob;
    w.cumulative_[i] = c;
  }
  w.cumulative_.back() = 1.0;
  return w;
}

bool WeightLaw::in_support(double t) const noexcept {
  if (kind_ == Kind::uniform) return t >= lo_ && t <= hi_;
  return atom_index(t).has_value();
}

std::optional<std::size_t> WeightLaw::atom_index(double t) const noexcept {
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (same_point(t, atoms_[i].value)) return i;
  }
  return std::nullopt;
}

double WeightLaw::cdf(double t) const noexcept {
  if (kind_ == Kind::uniform) {
    if (t <= lo_) return 0.0;
    if (t >= hi_) return 1.0;
    return (t - lo_) / (hi_ - lo_);
  }
  double c = 0.0;
  for (const auto& a : atoms_) {
    if (a.value <= t) c += a.prob;
  }
  return std::min(c, 1.0);
}

double WeightLaw::mid_cdf(double t) const noexcept {
  if (kind_ == Kind::uniform) return cdf(t);
  double below = 0.0;
  double at = 0.0;
  for (const auto& a : atoms_) {
    if (same_point(t, a.value)) {
      at += a.prob;
    } else if (a.value < t) {
      below += a.prob;
    }
  }
  return below + 0.5 * at;
}

double WeightLaw::quantile(double u) const noexcept {
  if (kind_ == Kind::uniform) return lo_ + (hi_ - lo_) * u;
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                                         atoms_.size() - 1);
  return atoms_[idx].value;
}

double WeightLaw::moment(double r) const noexcept {
  if (kind_ == Kind::uniform) {
    return (std::pow(hi_, r + 1.0) - std::pow(lo_, r + 1.0)) / ((r + 1.0) * (hi_ - lo_));
  }
  double m = 0.0;
  for (const auto& a : atoms_) m += a.prob * std::pow(a.value, r);
  return m;
}

double WeightLaw::expect(const std::function<double(double)>& f,
                         const std::vector<double>& breaks) const {
  if (kind_ == Kind::discrete) {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.prob * f(a.value);
    return s;
  }
  const double width = hi_ - lo_;
  const auto pts = partition(lo_, hi_, breaks);
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    s += integrate(f, pts[i], pts[i + 1]);
  }
  return s / width;
}

double PowerCurve::delta_at(double theta) const {
  return scale * std::pow(theta, exponent);
}

double PowerCurve::theta_at(double delta) const {
  return std::pow(delta / scale, 1.0 / exponent);
}

WeightPair::WeightPair(WeightLaw theta, WeightLaw delta, WeightCoupling coupling)
    : theta_(std::move(theta)), delta_(std::move(delta)), coupling_(coupling) {}

std::pair<double, double> WeightPair::sample(RngStream& rng) const {
  if (coupling_ == WeightCoupling::comonotone) {
    const double u = rng.uniform();
    return {theta_.quantile(u), delta_.quantile(u)};
  }
  const double t = theta_.sample(rng);
  const double d = delta_.sample(rng);
  return {t, d};
}

double WeightPair::expect(const std::function<double(double, double)>& f,
                          const std::optional<PowerCurve>& kink) const {
  if (coupling_ == WeightCoupling::comonotone) return expect_comonotone(f, kink);

  const bool theta_discrete = theta_.kind() == WeightLaw::Kind::discrete;
  const bool delta_discrete = delta_.kind() == WeightLaw::Kind::discrete;

  if (theta_discrete) {
    return theta_.expect([&](double t) {
      std::vector<double> cuts;
      if (kink && !delta_discrete) cuts.push_back(kink->delta_at(t));
      return delta_.expect([&](double d) { return f(t, d); }, cuts);
    });
  }
  if (delta_discrete) {
    return delta_.expect([&](double d) {
      std::vector<double> cuts;
      if (kink) cuts.push_back(kink->theta_at(d));
      return theta_.expect([&](double t) { return f(t, d); }, cuts);
    });
  }
  std::vector<double> outer_cuts;
  if (kink) {
    outer_cuts = {kink->theta_at(delta_.lo()), kink->theta_at(delta_.hi())};
  }
  return theta_.expect(
      [&](double t) {
        std::vector<double> cuts;
        if (kink) cuts.push_back(kink->delta_at(t));
        return delta_.expect([&](double d) { return f(t, d); }, cuts);
      },
      outer_cuts);
}

double WeightPair::expect_comonotone(const std::function<double(double, double)>& f,
                                     const std::optional<PowerCurve>& kink) const {
  // Both weights are quantile functions of one uniform u on [0, 1].
  std::vector<double> jumps;
  for (const WeightLaw* law : {&theta_, &delta_}) {
    if (law->kind() == WeightLaw::Kind::discrete) {
      double c = 0.0;
      for (const auto& a : law->atoms()) {
        c += a.prob;
        jumps.push_back(c);
      }
    }
  }
  const auto pieces = partition(0.0, 1.0, jumps);
  const bool both_discrete = theta_.kind() == WeightLaw::Kind::discrete &&
                             delta_.kind() == WeightLaw::Kind::discrete;
  auto integrand = [&](double u) { return f(theta_.quantile(u), delta_.quantile(u)); };

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
    const double a = pieces[i];
    const double b = pieces[i + 1];
    if (both_discrete) {
      total += (b - a) * integrand(0.5 * (a + b));
      continue;
    }
    std::vector<double> roots;
    if (kink) {
      auto side = [&](double u) { return kink->side(theta_.quantile(u), delta_.quantile(u)); };
      double u0 = a;
      double s0 = side(u0);
      for (int k = 1; k <= kRootScanPoints; ++k) {
        const double u1 = (k == kRootScanPoints) ? b : a + (b - a) * k / kRootScanPoints;
        const double s1 = side(u1);
        if ((s0 < 0.0 && s1 > 0.0) || (s0 > 0.0 && s1 < 0.0)) {
          double lo = u0;
          double hi = u1;
          for (int it = 0; it < kBisectionSteps; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double sm = side(mid);
            if ((sm < 0.0) == (s0 < 0.0)) {
              lo = mid;
            } else {
              hi = mid;
            }
          }
          roots.push_back(0.5 * (lo + hi));
        }
        u0 = u1;
        s0 = s1;
      }
    }
    const auto sub = partition(a, b, roots);
    for (std::size_t j = 0; j + 1 < sub.size(); ++j) {
      total += integrate(integrand, sub[j], sub[j + 1]);
    }
  }
  return total;
}

}  // namespace brvlab
