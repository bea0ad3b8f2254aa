#include "brvlab/rng.hpp"

namespace brvlab {

namespace {

constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t master_seed, std::uint64_t task_index,
                       std::uint64_t salt) noexcept {
  std::uint64_t z = splitmix64(master_seed);
  z = splitmix64(z ^ splitmix64(task_index + 0x632be59bd9b4e019ULL));
  z = splitmix64(z ^ splitmix64(salt + 0x2545f4914f6cdd1dULL));
  return z;
}

}  // namespace brvlab
