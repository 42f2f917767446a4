#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <vector>

// Deterministic random streams. Every stochastic component of the library
// draws from an explicit Rng so that runs are reproducible from a single
// 64-bit seed, independent of platform and of how work is scheduled.
// std:: distributions are avoided on purpose: their output is
// implementation-defined and would break cross-build reproducibility.

namespace frc {

inline std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  return mix64(state);
}

// Hashes a tuple of words (seed, purpose tag, indices, ...) into the seed of
// an independent substream. Trial-level parallelism relies on this: every
// trial owns a counter-derived stream, so aggregation order cannot matter.
inline std::uint64_t derive_seed(std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (std::uint64_t w : words) {
    h ^= w;
    h += 0x9e3779b97f4a7c15ULL;
    h = mix64(h);
  }
  return h;
}

// xoshiro256** with splitmix-expanded seeding.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Unbiased uniform integer in [0, bound); bound >= 1.
  std::uint64_t below(std::uint64_t bound) {
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < bound) {
      const std::uint64_t threshold = (-bound) % bound;
      while (lo < threshold) {
        m = static_cast<unsigned __int128>(next_u64()) * bound;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Standard normal via Box-Muller (cosine branch). Consumes exactly two
  // words per call, which keeps stream positions predictable.
  double gaussian() {
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    const double u = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double v = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;          // [0, 1)
    return std::sqrt(-2.0 * std::log(u)) * std::cos(kTwoPi * v);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t state_[4];
};

// Uniform k-subset of {0, ..., n-1} by Floyd's algorithm, returned sorted
// ascending. Draw count is exactly k calls to below().
inline void sample_subset_floyd(Rng& rng, int n, int k, std::vector<int>& out) {
  out.clear();
  for (int j = n - k; j < n; ++j) {
    const int candidate = static_cast<int>(rng.below(static_cast<std::uint64_t>(j) + 1));
    bool taken = false;
    for (int chosen : out) {
      if (chosen == candidate) {
        taken = true;
        break;
      }
    }
    out.push_back(taken ? j : candidate);
  }
  // Insertion sort: k is small everywhere this is used.
  for (std::size_t i = 1; i < out.size(); ++i) {
    int v = out[i];
    std::size_t j = i;
    for (; j > 0 && out[j - 1] > v; --j) out[j] = out[j - 1];
    out[j] = v;
  }
}

}  // namespace frc
