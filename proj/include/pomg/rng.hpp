#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>

namespace pomg {

/**
 * Counter-style seeded random stream (splitmix64 core).
 *
 * A stream is addressed by (master_seed, stream_index). Identical addresses
 * produce identical draw sequences no matter which thread or in which order
 * streams are consumed, which is what makes parallel episode sampling
 * byte-identical to sequential sampling.
 */
class SeededRng {
 public:
  SeededRng(std::uint64_t master_seed, std::uint64_t stream)
      : state_(mix(mix(master_seed) ^ mix(stream * 0x9E3779B97F4A7C15ULL + 1))) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  /// Uniform double in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Samples an index from an unnormalized-tolerant categorical row:
  /// first index whose running sum exceeds the uniform draw.
  int sample(std::span<const double> probs) {
    if (probs.empty()) throw std::invalid_argument("SeededRng::sample: empty row");
    const double u = next_double();
    double cum = 0.0;
    int last_positive = -1;
    for (int k = 0; k < static_cast<int>(probs.size()); ++k) {
      if (probs[k] > 0.0) last_positive = k;
      cum += probs[k];
      if (u < cum) return k;
    }
    if (last_positive < 0) throw std::invalid_argument("SeededRng::sample: all-zero row");
    return last_positive;  // guards u landing on accumulated rounding slack
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace pomg
