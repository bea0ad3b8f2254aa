#include "brvlab/tail_events.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace brvlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double phi(double v, bool positive_part) noexcept {
  return positive_part ? std::max(v, 0.0) : v;
}

// Claim level above which theta * phi(claim - c) > r.
double claim_threshold(double r, double theta, double c, bool positive_part) noexcept {
  if (theta == 0.0) return r < 0.0 ? -kInf : kInf;
  if (positive_part && r < 0.0) return -kInf;
  return c + r / theta;
}

bool uses_running_sums(PathEvent e) noexcept {
  return e == PathEvent::ruin_and || e == PathEvent::ruin_sim || e == PathEvent::ruin_or;
}

}  // namespace

const char* to_string(PathEvent e) noexcept {
  switch (e) {
    case PathEvent::first:
      return "first";
    case PathEvent::second:
      return "second";
    case PathEvent::corner:
      return "corner";
    case PathEvent::either:
      return "either";
    case PathEvent::ruin_and:
      return "and";
    case PathEvent::ruin_sim:
      return "sim";
    case PathEvent::ruin_or:
      return "or";
  }
  return "?";
}

void Path::clear() noexcept {
  theta.clear();
  delta.clear();
  x.clear();
  y.clear();
}

void Path::push(const JointDraw& d) {
  theta.push_back(d.theta);
  delta.push_back(d.delta);
  x.push_back(d.x);
  y.push_back(d.y);
}

bool path_indicator(PathEvent e, const Path& path, double a, double b, const PathModel& model) {
  double s = 0.0;
  double t = 0.0;
  bool hit_s = false;
  bool hit_t = false;
  bool hit_joint = false;
  for (std::size_t i = 0; i < path.size(); ++i) {
    s += path.theta[i] * phi(path.x[i] - model.premium_x, model.positive_part);
    t += path.delta[i] * phi(path.y[i] - model.premium_y, model.positive_part);
    hit_s = hit_s || s > a;
    hit_t = hit_t || t > b;
    hit_joint = hit_joint || (s > a && t > b);
  }
  switch (e) {
    case PathEvent::first:
      return s > a;
    case PathEvent::second:
      return t > b;
    case PathEvent::corner:
      return s > a && t > b;
    case PathEvent::either:
      return s > a || t > b;
    case PathEvent::ruin_and:
      return hit_s && hit_t;
    case PathEvent::ruin_sim:
      return hit_joint;
    case PathEvent::ruin_or:
      return hit_s || hit_t;
  }
  return false;
}

double quadrant_union_probability(const DependenceFamily& fam, double theta, double delta,
                                  std::vector<Quadrant> qs) {
  std::erase_if(qs, [](const Quadrant& q) { return q.a == kInf || q.b == kInf; });
  if (qs.empty()) return 0.0;
  std::sort(qs.begin(), qs.end(), [](const Quadrant& l, const Quadrant& r) {
    return l.a < r.a || (l.a == r.a && l.b < r.b);
  });
  // Keep the staircase of non-dominated corners: a increasing, b strictly decreasing.
  std::vector<Quadrant> stair;
  for (const auto& q : qs) {
    if (stair.empty() || q.b < stair.back().b) stair.push_back(q);
  }
  double p = 0.0;
  for (std::size_t j = 0; j < stair.size(); ++j) {
    const double next_a = j + 1 < stair.size() ? stair[j + 1].a : kInf;
    const double strip = fam.conditional_joint_survival(theta, delta, stair[j].a, stair[j].b) -
                         fam.conditional_joint_survival(theta, delta, next_a, stair[j].b);
    p += std::max(strip, 0.0);
  }
  return std::min(p, 1.0);
}

double path_conditional_probability(PathEvent e, const FamilySequence& seq, const Path& path,
                                    double a, double b, const PathModel& model) {
  const std::size_t n = path.size();
  if (n == 0) return path_indicator(e, path, a, b, model) ? 1.0 : 0.0;
  const auto& fx = seq.marginal_x();
  const auto& fy = seq.marginal_y();
  const bool pp = model.positive_part;

  std::vector<double> tx(n);
  std::vector<double> ty(n);
  std::vector<double> score(n);
  for (std::size_t j = 0; j < n; ++j) {
    tx[j] = path.theta[j] * phi(path.x[j] - model.premium_x, pp);
    ty[j] = path.delta[j] * phi(path.y[j] - model.premium_y, pp);
    score[j] = std::min(fx.survival(path.x[j]), fy.survival(path.y[j]));
  }

  const bool running = uses_running_sums(e);
  std::vector<Quadrant> event;
  std::vector<Quadrant> joint;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double th = path.theta[i];
    const double de = path.delta[i];

    // Thresholds for X_i and Y_i at each checkpoint k.
    double s_rest = 0.0;
    double t_rest = 0.0;
    double min_x = kInf;
    double min_y = kInf;
    event.clear();
    for (std::size_t k = 0; k < n; ++k) {
      if (k != i) {
        s_rest += tx[k];
        t_rest += ty[k];
      }
      if (!running && k + 1 < n) continue;
      double cx;
      double cy;
      if (k < i) {
        cx = s_rest > a ? -kInf : kInf;
        cy = t_rest > b ? -kInf : kInf;
      } else {
        cx = claim_threshold(a - s_rest, th, model.premium_x, pp);
        cy = claim_threshold(b - t_rest, de, model.premium_y, pp);
      }
      min_x = std::min(min_x, cx);
      min_y = std::min(min_y, cy);
      if (e == PathEvent::ruin_sim) event.push_back({cx, cy});
    }
    switch (e) {
      case PathEvent::first:
        event.push_back({min_x, -kInf});
        break;
      case PathEvent::second:
        event.push_back({-kInf, min_y});
        break;
      case PathEvent::corner:
      case PathEvent::ruin_and:
        event.push_back({min_x, min_y});
        break;
      case PathEvent::either:
      case PathEvent::ruin_or:
        event.push_back({min_x, -kInf});
        event.push_back({-kInf, min_y});
        break;
      case PathEvent::ruin_sim:
        break;
    }

    // Index i is the most extreme: min(F(X_i), G(Y_i)) below every other score.
    double xm = -kInf;
    double ym = -kInf;
    if (n > 1) {
      double m = 1.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) m = std::min(m, score[j]);
      }
      xm = fx.inverse_survival(m);
      ym = fy.inverse_survival(m);
    }
    joint.clear();
    for (const auto& q : event) {
      if (q.a == kInf || q.b == kInf) continue;
      joint.push_back({std::max(q.a, xm), q.b});
      joint.push_back({q.a, std::max(q.b, ym)});
    }
    total += quadrant_union_probability(seq[i], th, de, joint);
  }
  return total;
}

}  // namespace brvlab
