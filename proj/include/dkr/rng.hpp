#pragma once

#include <cstdint>
#include <random>

namespace dkr {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Independent engine for item `index` of a run seeded with `seed`. Results do
/// not depend on how items are scheduled across threads.
inline std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(index + 0x632BE59BD9B4E019ull)));
}

}  // namespace dkr
