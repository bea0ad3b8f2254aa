#include "brvlab/dep_families.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "brvlab/error.hpp"

namespace brvlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Survival level s of X given an FGM tilt c, from a uniform level v in (0, 1]:
// solves s (1 - c + c s) = v on (0, 1].
double fgm_survival_level(double c, double v) {
  const double b = 1.0 - c;
  return 2.0 * v / (b + std::sqrt(b * b + 4.0 * c * v));
}

std::array<double, 4> support_corners(const WeightPair& w, const MixingFunction& m) {
  const double tl = w.theta().lo();
  const double th = w.theta().hi();
  const double dl = w.delta().lo();
  const double dh = w.delta().hi();
  return {m(tl, dl), m(tl, dh), m(th, dl), m(th, dh)};
}

}  // namespace

const char* to_string(Variant v) noexcept {
  switch (v) {
    case Variant::independence:
      return "A";
    case Variant::marginal_tilt:
      return "B";
    case Variant::joint_mixture:
      return "C";
  }
  return "?";
}

DependenceFamily::DependenceFamily(Variant v, RvMarginal x, RvMarginal y, WeightPair w)
    : variant_(v), x_(x), y_(y), weights_(std::move(w)) {}

DependenceFamily DependenceFamily::independence(RvMarginal x, RvMarginal y, WeightPair weights,
                                                double tail_weight) {
  if (!(tail_weight >= 0.0 && tail_weight <= 1.0)) {
    throw DomainError("variant A tail weight must lie in [0, 1]");
  }
  DependenceFamily f(Variant::independence, x, y, std::move(weights));
  f.tail_weight_ = tail_weight;
  f.mixing_ = {tail_weight, 0.0, 0.0};
  f.mixing_max_ = tail_weight;
  return f;
}

DependenceFamily DependenceFamily::marginal_tilt(RvMarginal x, RvMarginal y, WeightPair weights,
                                                 double a1, double a2) {
  if (!(std::abs(a1) <= 1.0) || !(std::abs(a2) <= 1.0)) {
    throw DomainError("FGM strengths a1, a2 must lie in [-1, 1]");
  }
  DependenceFamily f(Variant::marginal_tilt, x, y, std::move(weights));
  f.a1_ = a1;
  f.a2_ = a2;
  f.tail_weight_ = 0.0;
  if (f.weights_.coupling() == WeightCoupling::independent) {
    f.g_normalizer_ = 1.0;
  } else {
    f.g_normalizer_ = f.weights_.expect([&](double t, double d) { return f.h1(t) * f.h2(d); });
  }
  return f;
}

DependenceFamily DependenceFamily::joint_mixture(RvMarginal x, RvMarginal y, WeightPair weights,
                                                 MixingFunction mixing) {
  const auto corners = support_corners(weights, mixing);
  const double w_min = *std::min_element(corners.begin(), corners.end());
  const double w_max = *std::max_element(corners.begin(), corners.end());
  if (!(w_min > 0.0)) {
    throw AssumptionViolation(
        "variant C mixing function must be > 0 on the weight support (g maps into (0, inf))");
  }
  if (w_max > 1.0) {
    throw DomainError("variant C mixing function must be <= 1 on the weight support");
  }
  DependenceFamily f(Variant::joint_mixture, x, y, std::move(weights));
  f.mixing_ = mixing;
  f.mixing_max_ = w_max;
  f.g_normalizer_ = mixing.base + mixing.theta_slope * f.weights_.theta().mean() +
                    mixing.delta_slope * f.weights_.delta().mean();
  f.tail_weight_ = f.g_normalizer_;
  return f;
}

double DependenceFamily::g_bound() const noexcept {
  switch (variant_) {
    case Variant::independence:
      return 1.0;
    case Variant::marginal_tilt:
      return h1_bound() * h2_bound() / g_normalizer_;
    case Variant::joint_mixture:
      return mixing_max_ / g_normalizer_;
  }
  return 1.0;
}

void DependenceFamily::require_theta(double theta) const {
  if (!weights_.theta().in_support(theta)) {
    throw DomainError("theta outside the support of the weight law");
  }
}

void DependenceFamily::require_delta(double delta) const {
  if (!weights_.delta().in_support(delta)) {
    throw DomainError("delta outside the support of the weight law");
  }
}

double DependenceFamily::tilt_x(double theta) const noexcept {
  return a1_ * (1.0 - 2.0 * weights_.theta().mid_cdf(theta));
}

double DependenceFamily::tilt_y(double delta) const noexcept {
  return a2_ * (1.0 - 2.0 * weights_.delta().mid_cdf(delta));
}

double DependenceFamily::h1(double theta) const {
  require_theta(theta);
  return variant_ == Variant::marginal_tilt ? 1.0 - tilt_x(theta) : 1.0;
}

double DependenceFamily::h2(double delta) const {
  require_delta(delta);
  return variant_ == Variant::marginal_tilt ? 1.0 - tilt_y(delta) : 1.0;
}

double DependenceFamily::g(double theta, double delta) const {
  require_theta(theta);
  require_delta(delta);
  switch (variant_) {
    case Variant::independence:
      return 1.0;
    case Variant::marginal_tilt:
      return h1(theta) * h2(delta) / g_normalizer_;
    case Variant::joint_mixture:
      return mixing_(theta, delta) / g_normalizer_;
  }
  return 1.0;
}

double DependenceFamily::mixing_weight(double theta, double delta) const noexcept {
  switch (variant_) {
    case Variant::independence:
      return tail_weight_;
    case Variant::marginal_tilt:
      return 0.0;
    case Variant::joint_mixture:
      return mixing_(theta, delta);
  }
  return 0.0;
}

double DependenceFamily::tilted_moment_x(double r) const {
  if (variant_ != Variant::marginal_tilt) return weights_.theta().moment(r);
  return weights_.theta().expect([&](double t) { return std::pow(t, r) * (1.0 - tilt_x(t)); });
}

double DependenceFamily::tilted_moment_y(double r) const {
  if (variant_ != Variant::marginal_tilt) return weights_.delta().moment(r);
  return weights_.delta().expect([&](double d) { return std::pow(d, r) * (1.0 - tilt_y(d)); });
}

double DependenceFamily::conditional_survival_x(double theta, double a) const noexcept {
  const double s = x_.survival(a);
  if (variant_ != Variant::marginal_tilt) return s;
  const double c = tilt_x(theta);
  return s * (1.0 - c + c * s);
}

double DependenceFamily::conditional_survival_y(double delta, double b) const noexcept {
  const double s = y_.survival(b);
  if (variant_ != Variant::marginal_tilt) return s;
  const double c = tilt_y(delta);
  return s * (1.0 - c + c * s);
}

double DependenceFamily::conditional_joint_survival(double theta, double delta, double a,
                                                    double b) const noexcept {
  if (variant_ == Variant::marginal_tilt) {
    return conditional_survival_x(theta, a) * conditional_survival_y(delta, b);
  }
  const double sx = x_.survival(a);
  const double sy = y_.survival(b);
  const double w = mixing_weight(theta, delta);
  return w * std::min(sx, sy) + (1.0 - w) * sx * sy;
}

double DependenceFamily::conditional_upper_moment_x(double theta, double delta, double a,
                                                    double b) const {
  if (variant_ == Variant::marginal_tilt) {
    const double alpha = x_.alpha();
    if (!(alpha > 1.0)) throw AssumptionViolation("upper moment requires alpha > 1");
    const double lo = std::max(a, x_.sigma());
    const double c = tilt_x(theta);
    double m = 0.0;
    if (std::isfinite(lo)) {
      const double sa = std::pow(x_.sigma(), alpha);
      const double s = x_.survival(lo);
      m = lo * s * (1.0 - c + c * s) +
          (1.0 - c) * sa * std::pow(lo, 1.0 - alpha) / (alpha - 1.0) +
          c * sa * sa * std::pow(lo, 1.0 - 2.0 * alpha) / (2.0 * alpha - 1.0);
    }
    return m * conditional_survival_y(delta, b);
  }
  const double w = mixing_weight(theta, delta);
  // Comonotone branch: Y > b  <=>  X > zb.
  const double zb = b < y_.sigma() ? -kInf
                                   : x_.sigma() * std::pow(b / y_.sigma(), y_.alpha() / x_.alpha());
  const double co = x_.partial_expectation(std::max(a, zb));
  const double ind = x_.partial_expectation(a) * y_.survival(b);
  return w * co + (1.0 - w) * ind;
}

MainDraw DependenceFamily::sample_given(double theta, double delta, RngStream& rng) const {
  if (variant_ == Variant::marginal_tilt) {
    const double sx = fgm_survival_level(tilt_x(theta), rng.uniform_pos());
    const double sy = fgm_survival_level(tilt_y(delta), rng.uniform_pos());
    return {x_.from_survival_level(sx), y_.from_survival_level(sy), Branch::independent};
  }
  const double w = mixing_weight(theta, delta);
  if (rng.uniform() < w) {
    const double s = rng.uniform_pos();
    return {x_.from_survival_level(s), y_.from_survival_level(s), Branch::comonotone};
  }
  const double sx = rng.uniform_pos();
  const double sy = rng.uniform_pos();
  return {x_.from_survival_level(sx), y_.from_survival_level(sy), Branch::independent};
}

JointDraw DependenceFamily::sample(RngStream& rng) const {
  const auto [theta, delta] = weights_.sample(rng);
  const auto m = sample_given(theta, delta, rng);
  return {m.x, m.y, theta, delta, m.branch};
}

FamilySequence::FamilySequence(std::vector<DependenceFamily> families)
    : families_(std::move(families)) {
  if (families_.empty()) throw DomainError("family sequence must be non-empty");
  const auto& x0 = families_.front().marginal_x();
  const auto& y0 = families_.front().marginal_y();
  for (const auto& f : families_) {
    if (f.marginal_x().alpha() != x0.alpha() || f.marginal_y().alpha() != y0.alpha()) {
      throw AssumptionViolation("per-index families must share tail indices (alpha, beta)");
    }
    if (!(f.marginal_x() == x0) || !(f.marginal_y() == y0)) {
      throw AssumptionViolation("per-index families must share the marginal laws of X and Y");
    }
  }
}

FamilySequence FamilySequence::iid(const DependenceFamily& family, std::size_t n) {
  if (n == 0) throw DomainError("horizon n must be >= 1");
  return FamilySequence(std::vector<DependenceFamily>(n, family));
}

}  // namespace brvlab
