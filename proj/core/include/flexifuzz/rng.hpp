#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace flexifuzz {

/// Seeded random source with platform-independent output.
///
/// std::mt19937_64 is fully specified by the C++ standard, and every draw
/// below is built from its raw 64-bit output (standard library distributions
/// are deliberately avoided because their streams differ across
/// implementations). Identical seeds therefore reproduce identical sequences
/// everywhere.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  /// Uniform integer in [0, n), unbiased via rejection sampling.
  std::uint64_t bounded(std::uint64_t n);

  /// Uniform double in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller on unit() draws (two draws per call).
  double normal();

  /// Fisher-Yates permutation of 0..n-1 (swaps from the front).
  std::vector<std::size_t> permutation(std::size_t n);

  /// m distinct indices from 0..n-1, uniformly, by partial Fisher-Yates.
  /// For fixed seed and n, the result for m1 < m2 is a prefix of the m2 draw.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t m);

  template <typename T>
  void shuffle(std::vector<T>& values) {
    if (values.size() < 2) return;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
      const std::size_t j = i + static_cast<std::size_t>(bounded(values.size() - i));
      std::swap(values[i], values[j]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

/// Derives an independent sub-seed for a named stream (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace flexifuzz
