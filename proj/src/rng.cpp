#include "bsg/rng.hpp"

namespace bsg {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Rng Rng::for_round(std::uint64_t session_seed, std::uint64_t round_index) {
  return Rng(splitmix64(session_seed + (round_index + 1) * kGolden));
}

}  // namespace bsg
