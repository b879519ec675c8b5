#pragma once

#include <cstdint>
#include <random>

namespace apbda {

/// Seeded random stream with platform-independent derived distributions.
///
/// std::mt19937_64 is fully specified by the standard, but the library
/// distributions (uniform_real_distribution etc.) are not, so every draw
/// used by the simulator and instance generators goes through the helpers
/// below. Each consumer owns its own stream.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(mix(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo, hi). Returns lo when lo == hi.
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer on [0, n). n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n);

  bool bernoulli(double p) { return uniform01() < p; }

  /// Poisson-distributed count with the given mean (Knuth, chunked so that
  /// exp(-mean) never underflows).
  std::uint64_t poisson(double mean);

  /// splitmix64 finalizer; keeps nearby seeds from producing correlated
  /// Mersenne Twister states.
  static std::uint64_t mix(std::uint64_t x);

 private:
  std::mt19937_64 engine_;
};

}  // namespace apbda
