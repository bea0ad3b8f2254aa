#include "brvlab/mc_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "brvlab/error.hpp"

namespace brvlab {

namespace {

constexpr double kZ95 = 1.959963984540054;

void check_scale(double x, const McOptions& opts) {
  if (!(x >= 1.0) || !std::isfinite(x)) throw DomainError("scale x must be finite and >= 1");
  if (opts.samples < 1000) throw DomainError("Monte-Carlo budget must be >= 1000 samples");
}

void flag_sparse(Estimate& e, EstimatorKind kind) {
  if (kind == EstimatorKind::plain && e.hits < kMinReliableHits) {
    e.warning = fmt::format("only {} hits; interval unreliable", e.hits);
  }
}

}  // namespace

Estimate Estimate::from(double point, double std_error, std::size_t n, std::size_t hits) {
  Estimate e;
  e.point = point;
  e.std_error = std_error;
  e.n = n;
  e.ci_lo = point - kZ95 * std_error;
  e.ci_hi = point + kZ95 * std_error;
  e.hits = hits;
  e.degenerate = hits == 0;
  if (e.degenerate) e.warning = "no nonzero contributions";
  return e;
}

Estimate merge(std::span<const Estimate> estimates) {
  if (estimates.empty()) throw DomainError("merge needs at least one estimate");
  std::size_t total = 0;
  std::size_t hits = 0;
  for (const auto& e : estimates) {
    total += e.n;
    hits += e.hits;
  }
  if (total == 0) throw DomainError("merge needs a positive total sample count");
  const double nt = static_cast<double>(total);
  double point = 0.0;
  double var = 0.0;
  for (const auto& e : estimates) {
    const double w = static_cast<double>(e.n) / nt;
    point += w * e.point;
    var += w * w * e.std_error * e.std_error;
  }
  return Estimate::from(point, std::sqrt(var), total, hits);
}

MomentAccumulator::MomentAccumulator(std::size_t k)
    : k_(k), mean_(k, 0.0), comoment_(k * k, 0.0), hits_(k, 0), scratch_(k, 0.0) {}

void MomentAccumulator::add(std::span<const double> v) {
  ++n_;
  const double inv = 1.0 / static_cast<double>(n_);
  auto& d = scratch_;
  for (std::size_t i = 0; i < k_; ++i) {
    d[i] = v[i] - mean_[i];
    mean_[i] += d[i] * inv;
    if (v[i] != 0.0) ++hits_[i];
  }
  for (std::size_t i = 0; i < k_; ++i) {
    for (std::size_t j = 0; j < k_; ++j) {
      comoment_[i * k_ + j] += d[i] * (v[j] - mean_[j]);
    }
  }
}

void MomentAccumulator::merge(const MomentAccumulator& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(o.n_);
  const double n = na + nb;
  std::vector<double> delta(k_);
  for (std::size_t i = 0; i < k_; ++i) delta[i] = o.mean_[i] - mean_[i];
  for (std::size_t i = 0; i < k_; ++i) {
    for (std::size_t j = 0; j < k_; ++j) {
      comoment_[i * k_ + j] += o.comoment_[i * k_ + j] + delta[i] * delta[j] * na * nb / n;
    }
  }
  for (std::size_t i = 0; i < k_; ++i) {
    mean_[i] += delta[i] * nb / n;
    hits_[i] += o.hits_[i];
  }
  n_ += o.n_;
}

double MomentAccumulator::covariance(std::size_t i, std::size_t j) const {
  if (n_ < 2) return 0.0;
  return comoment_[i * k_ + j] / static_cast<double>(n_ - 1);
}

Estimate MomentAccumulator::estimate(std::size_t i, double scale) const {
  const double var = std::max(covariance(i, i), 0.0);
  return Estimate::from(scale * mean_[i], scale * std::sqrt(var / static_cast<double>(n_)), n_,
                        hits_[i]);
}

Estimate MomentAccumulator::ratio(std::size_t i, std::size_t j, double scale) const {
  if (mean_[j] == 0.0) {
    Estimate e = Estimate::from(0.0, 0.0, n_, 0);
    e.warning = "denominator has no hits";
    return e;
  }
  const double r = mean_[i] / mean_[j];
  const double v = covariance(i, i) - 2.0 * r * covariance(i, j) + r * r * covariance(j, j);
  const double se =
      std::sqrt(std::max(v, 0.0) / static_cast<double>(n_)) / std::abs(mean_[j]);
  return Estimate::from(scale * r, std::abs(scale) * se, n_, std::min(hits_[i], hits_[j]));
}

Estimate MomentAccumulator::linear(std::span<const double> c, double scale) const {
  double m = 0.0;
  double v = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < k_; ++i) {
    m += c[i] * mean_[i];
    if (c[i] != 0.0) hits = std::max(hits, hits_[i]);
    for (std::size_t j = 0; j < k_; ++j) v += c[i] * c[j] * covariance(i, j);
  }
  return Estimate::from(scale * m, std::abs(scale) * std::sqrt(std::max(v, 0.0) / n_), n_, hits);
}

MomentAccumulator run_blocks(std::size_t dimension, const McOptions& opts, const BlockFn& fn) {
  if (opts.block_size == 0) throw DomainError("block size must be > 0");
  const std::size_t blocks = (opts.samples + opts.block_size - 1) / opts.block_size;
  std::vector<MomentAccumulator> parts(blocks, MomentAccumulator(dimension));

  auto do_block = [&](std::size_t b) {
    const std::size_t begin = b * opts.block_size;
    const std::size_t count = std::min(opts.block_size, opts.samples - begin);
    fn(StreamSpec{opts.seed, b}, count, parts[b]);
  };

  const std::size_t workers = std::clamp<std::size_t>(opts.workers, 1, std::max<std::size_t>(blocks, 1));
  if (workers == 1) {
    for (std::size_t b = 0; b < blocks; ++b) do_block(b);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t b = next.fetch_add(1);
          if (b >= blocks) return;
          try {
            do_block(b);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next.store(blocks);
            return;
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  MomentAccumulator total(dimension);
  for (const auto& p : parts) total.merge(p);
  return total;
}

PathSource PathSource::stopped(const DependenceFamily& fam, StoppingLaw n) {
  const std::size_t cap = n.max();
  return {FamilySequence::iid(fam, cap), std::move(n)};
}

PathSampler::PathSampler(const PathSource& source, const StreamSpec& spec) : source_(&source) {
  streams_.reserve(source.seq.size());
  for (std::size_t i = 0; i < source.seq.size(); ++i) streams_.push_back(spec.open(index_salt(i)));
  if (source.stopping) count_stream_.emplace(spec.open(kStoppingSalt));
}

void PathSampler::next(Path& path) {
  const std::size_t n = source_->stopping ? source_->stopping->sample(*count_stream_)
                                          : source_->seq.size();
  path.clear();
  for (std::size_t i = 0; i < n; ++i) path.push(source_->seq[i].sample(streams_[i]));
}

MomentAccumulator simulate_events(const PathSource& source, std::span<const EventQuery> queries,
                                  const McOptions& opts) {
  const std::size_t k = queries.size();
  return run_blocks(k, opts, [&](const StreamSpec& spec, std::size_t count, MomentAccumulator& acc) {
    PathSampler sampler(source, spec);
    Path path;
    std::vector<double> v(k);
    for (std::size_t s = 0; s < count; ++s) {
      sampler.next(path);
      for (std::size_t j = 0; j < k; ++j) {
        const auto& qy = queries[j];
        v[j] = opts.kind == EstimatorKind::plain
                   ? (path_indicator(qy.event, path, qy.a, qy.b, qy.model) ? 1.0 : 0.0)
                   : path_conditional_probability(qy.event, source.seq, path, qy.a, qy.b, qy.model);
      }
      acc.add(v);
    }
  });
}

Estimate estimate_scaled_corner(const DependenceFamily& fam, double p, double q, double x,
                                const McOptions& opts) {
  return estimate_scaled_sum_corner(FamilySequence::iid(fam, 1), p, q, x, opts);
}

Estimate estimate_scaled_sum_corner(const FamilySequence& seq, double p, double q, double x,
                                    const McOptions& opts) {
  check_scale(x, opts);
  const EventQuery query{PathEvent::corner, seq.marginal_x().normalization(x) * p,
                         seq.marginal_y().normalization(x) * q, {}};
  const auto acc = simulate_events(PathSource::fixed(seq), std::span(&query, 1), opts);
  Estimate e = acc.estimate(0, x);
  flag_sparse(e, opts.kind);
  return e;
}

Estimate estimate_marginal_sum_tail(const FamilySequence& seq, Side side, double multiplier,
                                    double x, const McOptions& opts) {
  check_scale(x, opts);
  if (!(multiplier > 0.0)) throw DomainError("threshold multiplier must be > 0");
  EventQuery query;
  if (side == Side::first) {
    query = {PathEvent::first, seq.marginal_x().normalization(x) * multiplier, 0.0, {}};
  } else {
    query = {PathEvent::second, 0.0, seq.marginal_y().normalization(x) * multiplier, {}};
  }
  const auto acc = simulate_events(PathSource::fixed(seq), std::span(&query, 1), opts);
  Estimate e = acc.estimate(0, x);
  flag_sparse(e, opts.kind);
  return e;
}

SumTailEstimates estimate_sum_tails(const PathSource& source, double p, double q, double x,
                                    const McOptions& opts) {
  check_scale(x, opts);
  const double a = source.seq.marginal_x().normalization(x) * p;
  const double b = source.seq.marginal_y().normalization(x) * q;
  const EventQuery queries[] = {
      {PathEvent::first, a, b, {}},
      {PathEvent::second, a, b, {}},
      {PathEvent::corner, a, b, {}},
  };
  const auto acc = simulate_events(source, queries, opts);
  SumTailEstimates r;
  r.first = acc.estimate(0, x);
  r.second = acc.estimate(1, x);
  r.corner = acc.estimate(2, x);
  const double box[] = {1.0, 1.0, -1.0};
  r.box = acc.linear(box, x);
  r.corner_given_second = acc.ratio(2, 1);
  for (Estimate* e : {&r.first, &r.second, &r.corner, &r.box, &r.corner_given_second}) {
    flag_sparse(*e, opts.kind);
  }
  return r;
}

}  // namespace brvlab
