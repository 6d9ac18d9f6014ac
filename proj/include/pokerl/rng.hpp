#pragma once

#include <cstdint>

namespace pokerl {

/// SplitMix64 finalizer (Steele, Lea & Flood). Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Deterministic 64-bit generator with a single word of state.
///
/// The algorithm is pinned (SplitMix64: add the golden-ratio increment, then
/// finalize with mix64) so trajectories are reproducible on every platform.
/// It lives inside WorldState by value; copying the state forks the stream.
class SplitMix64 {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  constexpr SplitMix64() noexcept = default;
  constexpr explicit SplitMix64(std::uint64_t state) noexcept : state_(state) {}

  /// Stream for a (seed, stream id) pair, e.g. (episode seed, sequence).
  static constexpr SplitMix64 seeded(std::uint64_t seed, std::uint64_t stream) noexcept {
    return SplitMix64(mix64(seed ^ mix64(stream + kGamma)));
  }

  constexpr std::uint64_t next() noexcept {
    state_ += kGamma;
    return mix64(state_);
  }

  /// Uniform integer in [0, n). Modulo bias is below 2^-60 for the small n used here.
  constexpr std::uint32_t below(std::uint32_t n) noexcept {
    return static_cast<std::uint32_t>(next() % n);
  }

  /// Uniform double in [0, 1) from the top 53 bits.
  constexpr double uniform() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  constexpr std::uint64_t state() const noexcept { return state_; }

  friend constexpr bool operator==(const SplitMix64&, const SplitMix64&) = default;

 private:
  std::uint64_t state_ = 0;
};

}  // namespace pokerl
