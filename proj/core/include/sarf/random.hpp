#pragma once

#include <cstdint>

namespace sarf {

// splitmix64 finalizer. Used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed of stream `index` under a base seed:
//   splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019)).
// Reimplementations must use exactly this mixing to reproduce models.
constexpr std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

// xoshiro256** seeded through splitmix64. All draws are defined bit-exactly
// here (no std distributions) so results are portable across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  // Uniform integer in [0, bound). bound must be > 0. Lemire's method with rejection.
  std::uint64_t uniform_below(std::uint64_t bound);
  // Uniform integer in [lo, hi] inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  // Uniform double in [0, 1) from the top 53 bits.
  double uniform01();
  // Standard normal via Box-Muller (cosine branch only, one value per call).
  double normal();

 private:
  std::uint64_t s_[4];
};

}  // namespace sarf
