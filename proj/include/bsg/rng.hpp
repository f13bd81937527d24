#pragma once

#include <cstdint>
#include <random>

namespace bsg {

/// SplitMix64 finalizer (Steele, Lea & Flood).
std::uint64_t splitmix64(std::uint64_t x);

/// Seeded 64-bit Mersenne Twister with a platform-independent uniform draw.
///
/// Stream splitting: round r of a session seeded with s draws from
///   Rng(splitmix64(s + (r + 1) * 0x9E3779B97F4A7C15)),
/// i.e. the (r+1)-th output of a SplitMix64 sequence started at s. Rounds
/// therefore never share state and can be replayed independently.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng for_round(std::uint64_t session_seed, std::uint64_t round_index);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform double in [0, 1) from the top 53 bits of one draw.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Returns 0 with probability p0, else 1.
  int binary(double p0) { return uniform() < p0 ? 0 : 1; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace bsg
