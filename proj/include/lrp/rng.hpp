// Deterministic 64-bit mixing and streams. Hand-rolled so that edge sets are
// bit-identical across platforms and standard library versions.
#pragma once

#include <cstdint>

#include "lrp/lattice.hpp"

namespace lrp {

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Splittable seed derivation: independent streams for (seed, index) pairs.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(seed ^ mix64(index ^ 0xA5A5A5A55A5A5A5AULL));
}

/// splitmix64 stream.
struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0,1), 53 random bits.
  double next_unit() { return double(next() >> 11) * 0x1.0p-53; }

  // Uniform in (0,1], safe as a log() argument.
  double next_unit_pos() { return double((next() >> 11) + 1) * 0x1.0p-53; }
};

/// Order-independent hash of (seed, pair of lattice points), used by the
/// hash sampler backend. Callers pass the endpoints in canonical order.
inline std::uint64_t hash_pair(std::uint64_t seed, const Point& x, const Point& y) {
  std::uint64_t h = mix64(seed ^ 0xC2B2AE3D27D4EB4FULL);
  for (Coord c : x) h = mix64(h ^ static_cast<std::uint64_t>(c));
  for (Coord c : y) h = mix64(h ^ static_cast<std::uint64_t>(c));
  return h;
}

inline double unit_from_hash(std::uint64_t h) { return double(h >> 11) * 0x1.0p-53; }

}  // namespace lrp
