#pragma once

#include <cstdint>

namespace pedfuse {

/// SplitMix64 pseudo-random generator (Steele, Lea, Flood 2014). Chosen for
/// its tiny, exactly specified state transition so fixtures reproduce
/// bit-identically across languages: each step adds 0x9E3779B97F4A7C15 to
/// the state and returns a mixed copy of it.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0,1) using the top 53 bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  /// true with probability p.
  bool bernoulli(double p) { return next_double() < p; }

 private:
  std::uint64_t state_;
};

}  // namespace pedfuse
