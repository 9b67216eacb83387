#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace charmer {

// mt19937_64 is fully specified by the standard; the distributions are not,
// so sampling goes through these helpers to keep seeded runs identical
// across standard libraries.
using Rng = std::mt19937_64;

/// Uniform integer in [0, n). n must be positive.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = Rng::max() - (Rng::max() % n + 1) % n;
  std::uint64_t x = rng();
  while (x > limit) x = rng();
  return x % n;
}

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[uniform_below(rng, i)]);
  }
}

/// `count` distinct values from [0, n) in draw order (partial Fisher-Yates).
inline std::vector<std::size_t> sample_without_replacement(Rng& rng,
                                                           std::size_t n,
                                                           std::size_t count) {
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  if (count > n) count = n;
  for (std::size_t i = 0; i < count; ++i) {
    std::swap(pool[i], pool[i + uniform_below(rng, n - i)]);
  }
  pool.resize(count);
  return pool;
}

}  // namespace charmer
