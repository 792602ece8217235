#pragma once

#include <cmath>
#include <cstdint>

namespace cutoff {

// Counter-based 64-bit generator (splitmix64 finalizer over a Weyl sequence).
// Streams are pure functions of (seed, stream): identical on every platform
// and independent of execution order.
class SplitMix {
 public:
  SplitMix(uint64_t seed, uint64_t stream) : state_(mix(seed ^ mix(stream + kGolden))) {}

  uint64_t next() {
    state_ += kGolden;
    return mix(state_);
  }

  // strictly inside (0,1)
  double uniform() { return (double(next() >> 11) + 0.5) * 0x1.0p-53; }

  double exponential(double rate) { return -std::log(uniform()) / rate; }

  // uniform integer in [0, n)
  uint64_t below(uint64_t n) {
    // rejection-free would bias for huge n; n here is tiny relative to 2^64
    return next() % n;
  }

  static uint64_t mix(uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

 private:
  static constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
  uint64_t state_;
};

}  // namespace cutoff
