#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace sams {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; mixes a master seed with stream coordinates so every
/// (epoch, sentence) pair gets an independent, reproducible generator.
inline std::uint64_t mixSeed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t deriveSeed(std::uint64_t master, std::initializer_list<std::uint64_t> coords) {
  std::uint64_t s = mixSeed(master);
  for (std::uint64_t c : coords) s = mixSeed(s ^ mixSeed(c + 0x632be59bd9b4e019ULL));
  return s;
}

/// Uniform real in [lo, hi) computed from raw 53-bit draws, so values do not
/// depend on the standard library's distribution implementation.
inline double uniform(Rng& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

/// Uniform integer in [0, n) by rejection sampling.
inline std::uint64_t uniformIndex(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

}  // namespace sams
