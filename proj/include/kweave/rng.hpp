#pragma once

#include <cstdint>

#include "kweave/linalg.hpp"

namespace kweave {

/// splitmix64 (Vigna's public-domain generator). Chosen over <random>
/// engines because its output is a pure function of the 64-bit state, so
/// seeded runs are reproducible byte for byte across platforms, and streams
/// can be derived per trial index without coordination between workers.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  /// Independent stream for (seed, index): finalize the seed, then offset by
  /// the index times the golden-ratio increment and finalize again.
  static SplitMix64 stream(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 g(mix(seed) + (index + 1) * 0x9E3779B97F4A7C15ull);
    g.state = mix(g.state);
    return g;
  }

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0,1) with 53 significant bits.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool next_bernoulli(double p) { return next_double() < p; }

  /// Standard normal via Box-Muller on two uniforms (no cached spare, so a
  /// stream's output depends only on how many numbers were drawn).
  double next_gaussian();
};

/// Uniform random unit vector (Gaussian direction, normalized).
KVector random_unit_vector(std::size_t dim, bool complex_entries, SplitMix64& rng);

}  // namespace kweave
