#pragma once

#include <cstdint>

namespace pcap {

/// Small deterministic RNG (splitmix64). Used everywhere instead of the
/// standard distributions so that streams are identical across platforms
/// and across thread counts.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform in [lo, hi).
  double next_range(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  /// Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) {
    // Double conversion keeps the stream identical regardless of modulo
    // bias tricks; n is always tiny here.
    return static_cast<std::uint64_t>(next_double() * static_cast<double>(n));
  }

  /// Independent child stream, stable under reordering of draws.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
    Rng r(seed ^ (0x632be59bd9b4e019ull + stream * 0x9e3779b97f4a7c15ull));
    return r.next_u64();
  }

 private:
  std::uint64_t state_;
};

}  // namespace pcap
