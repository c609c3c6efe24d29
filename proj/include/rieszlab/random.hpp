#pragma once

#include <cstdint>
#include <random>

namespace rieszlab {

/// SplitMix64 finalizer; maps (seed, counter) pairs to decorrelated seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (counter + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Generator for stream `counter` of a run seeded with `seed`. Streams are
/// independent of evaluation order, so parallel trials stay reproducible.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t counter) {
  return std::mt19937_64(mix_seed(seed, counter));
}

}  // namespace rieszlab
