#pragma once

#include <cstdint>

namespace invlab {

/// Deterministic counter-style generator with explicit streams.
///
/// State update and output (see docs/rng.md for the full recipe):
///   state <- state + 0x9E3779B97F4A7C15
///   out   <- mix(state)
/// where mix is the 64-bit finalizer
///   z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
///   z ^= z >> 27; z *= 0x94D049BB133111EB;
///   z ^= z >> 31;
/// Identical (master_seed, stream_id) pairs yield identical output streams on
/// every platform; distinct stream ids give independent streams, so parallel
/// experiments stay reproducible regardless of scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t master_seed, std::uint64_t stream_id = 0)
      : state_(mix(master_seed + kGamma) ^ mix(stream_id + kStreamSalt)) {}

  std::uint64_t next_u64() {
    state_ += kGamma;
    return mix(state_);
  }

  /// Unbiased draw from {0, ..., bound-1} by rejection sampling. bound >= 1.
  std::uint64_t uniform_below(std::uint64_t bound) {
    // Reject the low sliver [0, 2^64 mod bound) so every residue is equally
    // likely.
    std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  /// Uniform real in [0, 1) with 53 random bits.
  double next_real01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Child generator derived from the current state; does not advance the
  /// parent. Used to hand independent streams to parties / parallel tasks.
  Rng substream(std::uint64_t id) const {
    Rng child(raw_tag{}, mix(state_ + kStreamSalt * (id + 1)));
    return child;
  }

 private:
  struct raw_tag {};
  Rng(raw_tag, std::uint64_t raw_state) : state_(raw_state) {}

  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kStreamSalt = 0xD1B54A32D192ED03ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_;
};

}  // namespace invlab
