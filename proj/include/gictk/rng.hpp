#pragma once

#include <cstdint>
#include <random>

#include "gictk/time.hpp"

namespace gictk {

// splitmix64, used to derive independent per-task seeds from one master seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(splitmix64(seed)); }

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  return Rng(splitmix64(seed ^ splitmix64(stream + 1)));
}

// Uniform double in the open interval (0, 1).
inline double uniform01(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
}

// Uniform double in the open interval (lo, hi).
inline double uniform_open(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

// Uniform integer nanoseconds in the closed interval [lo, hi].
inline DurNs uniform_ns(Rng& rng, DurNs lo, DurNs hi) {
  return std::uniform_int_distribution<DurNs>(lo, hi)(rng);
}

}  // namespace gictk
