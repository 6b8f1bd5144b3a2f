#pragma once
/// Counter-based splittable pseudo-random streams.
///
/// A stream is identified by a 64-bit key; draw i of a stream is a fixed
/// avalanche mix of (key, i). Child streams are derived by hashing the parent
/// key with a child index, so every draw in a hierarchy of streams is a pure
/// function of (master seed, path of child indices, draw position) and does
/// not depend on how many values sibling streams have consumed. This is what
/// makes ensembles reproducible under any work scheduling, and lets a prefix
/// of a sampled object be recomputed without drawing the rest.

#include <cstdint>
#include <cmath>
#include <vector>

namespace umet {

inline constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ull;

/// 64-bit finalizer with full avalanche.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

class rng {
 public:
  explicit rng(std::uint64_t seed)
      : key_(mix64(seed + golden_gamma)), counter_(0) {}

  /// Derive child stream `index`; independent of this stream's position.
  rng child(std::uint64_t index) const {
    rng c(0);
    c.key_ = mix64(key_ ^ mix64((index + 1) * golden_gamma));
    c.counter_ = 0;
    return c;
  }

  /// Stable identity of this stream (used to derive per-chain seeds).
  std::uint64_t key() const { return key_; }

  std::uint64_t next_u64() {
    counter_ += 1;
    return mix64(key_ + counter_ * golden_gamma);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) {
    return lo + next_double() * (hi - lo);
  }

  /// Uniform integer in [0, n); rejection sampling, no modulo bias.
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = ~std::uint64_t(0) - ~std::uint64_t(0) % n;
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
  }

  double exponential(double rate) {
    return -std::log1p(-next_double()) / rate;
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = std::size_t(uniform_index(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  /// Uniform random permutation of {0, .., n-1}.
  std::vector<int> permutation(int n) {
    auto p = std::vector<int>(std::size_t(n));
    for (int i = 0; i < n; ++i) p[std::size_t(i)] = i;
    shuffle(p);
    return p;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace umet
