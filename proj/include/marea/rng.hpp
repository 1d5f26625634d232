#pragma once

#include <cstdint>
#include <random>

namespace marea {

/// Independent, reproducible random stream. Streams derived from the same
/// (seed, stream_id) pair produce identical draws on every platform:
/// std::mt19937_64 is fully specified and the conversions below avoid the
/// implementation-defined standard distributions.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id) : engine_(mix(seed, stream_id)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [lo, hi], hi >= lo.
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {
    const std::uint64_t span = hi - lo + 1;
    if (span == 0) return engine_();  // full 64-bit range
    // rejection sampling keeps the draw unbiased
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return lo + x % span;
  }

  /// Standard normal via Box-Muller (one value per call; deterministic).
  double normal(double mean, double stddev);

 private:
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream_id) {
    // splitmix64 finalizer over the combined key
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream_id + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
};

}  // namespace marea
