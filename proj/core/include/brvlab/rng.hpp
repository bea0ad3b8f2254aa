#pragma once

#include <cstdint>
#include <random>

namespace brvlab {

/// Strong 64-bit mix (splitmix64 finalizer chain) of a master seed, a task
/// index and a salt. Distinct (index, salt) pairs give unrelated seeds.
std::uint64_t mix_seed(std::uint64_t master_seed, std::uint64_t task_index,
                       std::uint64_t salt = 0) noexcept;

/// A single reproducible random stream. Not thread-safe; one per task.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1]; safe as a survival level.
  double uniform_pos() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

/// Identifies the substream of one unit of work.
struct StreamSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t task_index = 0;

  RngStream open(std::uint64_t salt = 0) const {
    return RngStream(mix_seed(master_seed, task_index, salt));
  }
};

}  // namespace brvlab
