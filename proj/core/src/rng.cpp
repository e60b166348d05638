#include "flexifuzz/rng.hpp"

#include <cmath>
#include <numbers>

#include "flexifuzz/errors.hpp"

namespace flexifuzz {

std::uint64_t SeededRng::bounded(std::uint64_t n) {
  if (n == 0) throw ArgumentError("bounded(0) is undefined");
  // Reject the top partial bucket so every residue is equally likely.
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n + 1) % n;
  std::uint64_t x;
  do {
    x = next();
  } while (x > limit);
  return x % n;
}

double SeededRng::normal() {
  // Box-Muller; u1 is kept away from zero so the log is finite.
  double u1;
  do {
    u1 = unit();
  } while (u1 <= 0.0);
  const double u2 = unit();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<std::size_t> SeededRng::permutation(std::size_t n) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  shuffle(idx);
  return idx;
}

std::vector<std::size_t> SeededRng::sample_without_replacement(std::size_t n,
                                                               std::size_t m) {
  if (m > n) throw ArgumentError("sample size exceeds population");
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(bounded(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(m);
  return idx;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace flexifuzz
