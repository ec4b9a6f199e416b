#pragma once

// Counter-based random streams. A stream is keyed by (seed, round, agent),
// so any agent's draws in any round can be reproduced independently of
// evaluation order.

#include <cstdint>
#include <limits>

namespace gdc {

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

/// SplitMix64 output function (Steele, Lea, Flood 2014).
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// SplitMix64 stream whose starting state is a hash of the key triple.
/// Satisfies UniformRandomBitGenerator.
class StreamRng {
 public:
  using result_type = std::uint64_t;

  // Bump the suffix whenever the keying or output changes.
  static constexpr const char* kAlgorithm = "splitmix64-keyed/1";

  constexpr StreamRng(std::uint64_t seed, std::uint64_t round, std::uint64_t agent)
      : state_(key(seed, round, agent)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() {
    state_ += kGoldenGamma;
    return splitmix64_mix(state_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform() {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

 private:
  static constexpr std::uint64_t key(std::uint64_t seed, std::uint64_t round,
                                     std::uint64_t agent) {
    std::uint64_t k = splitmix64_mix(seed + kGoldenGamma);
    k = splitmix64_mix(k ^ splitmix64_mix(round + 2 * kGoldenGamma));
    k = splitmix64_mix(k ^ splitmix64_mix(agent + 3 * kGoldenGamma));
    return k;
  }

  std::uint64_t state_;
};

}  // namespace gdc
