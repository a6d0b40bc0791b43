#pragma once

#include <cstdint>

namespace vibelsd {

// SplitMix64 finalizer; used for seeding and for deriving independent seed
// streams from a root seed.
inline std::uint64_t splitmix64_mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic stream splitting: (root, domain, stream) -> child seed.
// Domains keep unrelated consumers (permutation draws, shot sampling) on
// disjoint streams even when stream indices collide.
inline std::uint64_t split_seed(std::uint64_t root, std::uint64_t domain, std::uint64_t stream) {
  return splitmix64_mix(splitmix64_mix(root ^ splitmix64_mix(domain)) + stream);
}

namespace seed_domain {
inline constexpr std::uint64_t kPermutations = 0x5045524d; // "PERM"
inline constexpr std::uint64_t kSampling = 0x53414d50;     // "SAMP"
}  // namespace seed_domain

// xoshiro256** 1.0 (Blackman & Vigna), seeded via SplitMix64.  Fixed,
// platform-independent algorithm so seeded runs reproduce bit-identically
// everywhere.
class Xoshiro256ss {
 public:
  explicit Xoshiro256ss(std::uint64_t seed) {
    std::uint64_t z = seed;
    for (auto& w : s_) {
      z += 0x9e3779b97f4a7c15ULL;
      std::uint64_t x = z;
      x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
      x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
      w = x ^ (x >> 31);
    }
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Unbiased uniform integer in [0, bound); bound >= 1.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0ULL - bound) % bound;
    for (;;) {
      const std::uint64_t x = next();
      if (x >= threshold) return x % bound;
    }
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

}  // namespace vibelsd
