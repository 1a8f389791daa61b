#pragma once

// Counter-based random numbers: Philox4x32-10 (Salmon et al., SC'11).
//
// Stream layout, fixed so other implementations can reproduce it:
//   key     = (seed & 0xffffffff, seed >> 32)
//   counter = (block & 0xffffffff, block >> 32, chunk & 0xffffffff, chunk >> 32)
// where `chunk` names an independent sub-stream and `block` counts 128-bit
// outputs within it. Each block yields four 32-bit words consumed in order.
// Doubles in [0, 1) take 53 bits from two words: (w0 >> 5) * 2^26 + (w1 >> 6),
// scaled by 2^-53. Normals use Box-Muller on two such doubles, returning the
// cosine branch first and then the sine branch.
//
// Samplers split work into chunks of kChunkSamples outputs; chunk c always
// uses sub-stream c, so results do not depend on the number of threads.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

#include "archimedes/errors.hpp"

namespace archimedes {

inline constexpr std::uint64_t kChunkSamples = 65536;

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

inline PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) {
  constexpr std::uint32_t kM0 = 0xD2511F53u;
  constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t chunk = 0)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        chunk_(chunk) {}

  std::uint32_t next_u32() {
    if (pos_ == 4) refill();
    return buffer_[pos_++];
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() {
    const std::uint64_t a = next_u32() >> 5;
    const std::uint64_t b = next_u32() >> 6;
    return static_cast<double>((a << 26) | b) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  std::uint64_t blocks_used() const noexcept { return block_; }

 private:
  void refill() {
    buffer_ = philox4x32_10({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                             static_cast<std::uint32_t>(chunk_), static_cast<std::uint32_t>(chunk_ >> 32)},
                            key_);
    ++block_;
    pos_ = 0;
  }

  PhiloxKey key_;
  std::uint64_t chunk_;
  std::uint64_t block_ = 0;
  PhiloxCounter buffer_{};
  int pos_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Halton point `index` (index >= 1) in [0,1)^dim, bases = first primes.
inline void halton(std::uint64_t index, std::span<double> out) {
  static constexpr std::array<unsigned, 16> kPrimes = {2, 3, 5, 7, 11, 13, 17, 19,
                                                       23, 29, 31, 37, 41, 43, 47, 53};
  if (out.size() > kPrimes.size()) throw DomainError("halton: at most 16 dimensions");
  for (std::size_t d = 0; d < out.size(); ++d) {
    const unsigned base = kPrimes[d];
    double f = 1.0;
    double r = 0.0;
    for (std::uint64_t i = index; i > 0; i /= base) {
      f /= base;
      r += f * static_cast<double>(i % base);
    }
    out[d] = r;
  }
}

}  // namespace archimedes
