#pragma once

#include <cstdint>
#include <limits>

namespace detproc {

/// SplitMix64. The state advances by a fixed odd constant, so the k-th output
/// is a pure function of (start state, k): streams keyed by (seed, replica,
/// particle) are independent of execution order.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t state = 0) : state_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix(state_ += kGamma); }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Stream for (seed, a, b); distinct keys give unrelated start states.
  static SplitMix64 stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    return SplitMix64(mix(mix(mix(seed) ^ (a + kGamma)) ^ (b + 2 * kGamma)));
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  std::uint64_t state_;
};

}  // namespace detproc
