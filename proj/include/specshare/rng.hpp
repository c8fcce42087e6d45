#pragma once

#include <cstdint>

namespace specshare::rng {

// Stream purpose tags. A stream is derived from (master seed, purpose, index)
// so that topology generation, per-slot scheduling, churn and probe
// measurements never share random numbers, and any single stream can be
// reproduced in isolation.
inline constexpr std::uint64_t kTopology = 0x746f706f6c6f6779ull;
inline constexpr std::uint64_t kSchedule = 0x7363686564756c65ull;
inline constexpr std::uint64_t kChurn = 0x636875726e2e2e2eull;
inline constexpr std::uint64_t kProbe = 0x70726f62652e2e2eull;

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

// SplitMix64 finalizer.
inline std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Counter-based generator (SplitMix64 sequence on a mixed-in stream key).
class Stream {
 public:
  Stream(std::uint64_t master, std::uint64_t purpose, std::uint64_t index)
      : state_(mix(master + kGolden) ^ mix(purpose + index * kGolden)) {}

  std::uint64_t next_u64() {
    state_ += kGolden;
    return mix(state_);
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

 private:
  std::uint64_t state_;
};

}  // namespace specshare::rng
