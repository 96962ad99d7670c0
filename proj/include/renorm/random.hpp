#pragma once

#include <cmath>
#include <cstdint>

#include "renorm/numeric.hpp"

namespace renorm {

/// Counter-based generator: every draw is a pure function of (seed, counter),
/// so any partition of the counter space reproduces the same stream.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : key_(mix(seed ^ 0x9E3779B97F4A7C15ull)) {}

  std::uint64_t bits(std::uint64_t counter) const {
    return mix(key_ + counter * 0x9E3779B97F4A7C15ull);
  }

  /// Uniform on (0, 1].
  double uniform(std::uint64_t counter) const {
    return (static_cast<double>(bits(counter) >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller on counters 2k and 2k+1.
  double normal(std::uint64_t k) const {
    const double u1 = uniform(2 * k);
    const double u2 = uniform(2 * k + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

 private:
  // SplitMix64 finalizer.
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
};

}  // namespace renorm
