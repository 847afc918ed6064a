#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace qcbo {

// mt19937_64 drives every stochastic component. Distribution sampling is done
// by hand below because the std::*_distribution algorithms are
// implementation-defined and would break cross-platform reproducibility.
using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent substream: hash (seed, stream id) into a fresh seed.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  return Rng(splitmix64(splitmix64(seed) ^ splitmix64(stream * 0x9e3779b97f4a7c15ULL + 1)));
}

// Uniform on [0,1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return (rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

// Box-Muller, one variate per call; the second branch is discarded so a call
// always consumes exactly two generator words.
inline double normal01(Rng& rng) {
  double u1 = uniform01(rng), u2 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

inline int uniform_int(Rng& rng, int n) {
  // rejection-free modulo bias is negligible for the small n used here,
  // but do it properly anyway
  std::uint64_t limit = UINT64_MAX - UINT64_MAX % static_cast<std::uint64_t>(n);
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return static_cast<int>(v % static_cast<std::uint64_t>(n));
}

}  // namespace qcbo
