#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace plab {

// Philox4x32-10 counter-based generator. Any (counter, key) pair maps to
// four independent 32-bit words, so parallel loops stay deterministic and
// schedule-independent: index the counter by loop position instead of
// advancing shared state.
struct Philox4x32 {
  static std::array<uint32_t, 4> block(std::array<uint32_t, 4> ctr,
                                       std::array<uint32_t, 2> key) {
    constexpr uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
      uint64_t p0 = static_cast<uint64_t>(M0) * ctr[0];
      uint64_t p1 = static_cast<uint64_t>(M1) * ctr[2];
      uint32_t hi0 = static_cast<uint32_t>(p0 >> 32);
      uint32_t lo0 = static_cast<uint32_t>(p0);
      uint32_t hi1 = static_cast<uint32_t>(p1 >> 32);
      uint32_t lo1 = static_cast<uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
      key[0] += W0;
      key[1] += W1;
    }
    return ctr;
  }
};

// Keyed random stream: draws are pure functions of (seed, stream, index).
class CounterRng {
 public:
  CounterRng(uint64_t seed, uint64_t stream = 0)
      : seed_(seed), stream_(stream) {}

  std::array<uint32_t, 4> words(uint64_t index, uint32_t slot = 0) const {
    std::array<uint32_t, 4> ctr = {
        static_cast<uint32_t>(index), static_cast<uint32_t>(index >> 32),
        static_cast<uint32_t>(stream_), slot};
    std::array<uint32_t, 2> key = {static_cast<uint32_t>(seed_),
                                   static_cast<uint32_t>(seed_ >> 32)};
    uint32_t hi = static_cast<uint32_t>(stream_ >> 32);
    key[0] ^= hi * 0x9E3779B9u;
    return Philox4x32::block(ctr, key);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform(uint64_t index, uint32_t slot = 0) const {
    auto w = words(index, slot);
    uint64_t bits = (static_cast<uint64_t>(w[0]) << 21) | (w[1] >> 11);
    return static_cast<double>(bits) * 0x1.0p-53;
  }

  double uniform(uint64_t index, uint32_t slot, double lo, double hi) const {
    return lo + (hi - lo) * uniform(index, slot);
  }

  // Standard normal (Box-Muller on two uniform words).
  double normal(uint64_t index, uint32_t slot = 0) const {
    auto w = words(index, slot);
    double u1 = (static_cast<double>(w[0]) + 0.5) * 0x1.0p-32;
    double u2 = (static_cast<double>(w[1]) + 0.5) * 0x1.0p-32;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  uint32_t uniform_int(uint64_t index, uint32_t slot, uint32_t n) const {
    return static_cast<uint32_t>(uniform(index, slot) * n);
  }

  // Deterministic sample of k distinct values from {0, ..., n-1}
  // (partial Fisher-Yates keyed by (index, slot space)).
  std::vector<uint32_t> sample_without_replacement(uint64_t index, uint32_t n,
                                                   uint32_t k) const;

  // Rademacher sign.
  int sign(uint64_t index, uint32_t slot = 0) const {
    return (words(index, slot)[0] & 1u) ? 1 : -1;
  }

 private:
  uint64_t seed_;
  uint64_t stream_;
};

}  // namespace plab
