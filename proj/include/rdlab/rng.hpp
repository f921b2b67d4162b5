#pragma once

#include <cmath>
#include <cstdint>

namespace rdlab {

// SplitMix64 finalizer. Draws below are pure functions of (seed, index),
// so ensembles over (seed, epsilon) can be generated in any order and
// still reproduce bit-for-bit.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t rng_word(std::uint64_t seed, std::uint64_t index) {
  return mix64(mix64(seed) ^ (index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
}

// Uniform in (0, 1]; never returns 0, safe under log().
inline double rng_unit(std::uint64_t seed, std::uint64_t index) {
  return static_cast<double>((rng_word(seed, index) >> 11) + 1) * 0x1.0p-53;
}

// One standard normal per index (Box-Muller, cosine branch).
inline double rng_gauss(std::uint64_t seed, std::uint64_t index) {
  const double u1 = rng_unit(seed, 2 * index);
  const double u2 = rng_unit(seed, 2 * index + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace rdlab
