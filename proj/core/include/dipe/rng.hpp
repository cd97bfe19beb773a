#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace dipe {

/// SplitMix64 stream keyed by (seed, substream ids). Every consumer derives
/// its own substream, e.g. (seed, block, party) in the protocol module, so
/// results do not depend on scheduling or thread count.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(bootstrap(seed)) {}

  SplitMix64(std::uint64_t seed, std::initializer_list<std::uint64_t> stream_ids)
      : state_(bootstrap(seed)) {
    for (std::uint64_t id : stream_ids) state_ = bootstrap(state_ ^ mix(id + 0x9E3779B97F4A7C15ull));
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix(state_);
  }

  /// Uniform in [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound) by rejection.
  std::uint64_t uniform_int(std::uint64_t bound) {
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % bound;
  }

  /// Standard normal via Box-Muller (caches the second deviate).
  double gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(theta);
    have_cached_ = true;
    return r * std::cos(theta);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  static std::uint64_t bootstrap(std::uint64_t seed) {
    std::uint64_t s = seed + 0x9E3779B97F4A7C15ull;
    return mix(s);
  }

  std::uint64_t state_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace dipe
