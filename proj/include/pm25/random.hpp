#pragma once

#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace pm25 {

// Unbiased integer in [0, n) by rejection. Written out rather than using
// std::uniform_int_distribution so sequences do not depend on the standard
// library implementation.
inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % n;
  }
}

// Fisher-Yates permutation of 0..n-1.
inline std::vector<std::size_t> permutation(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(uniform_index(rng, i));
    std::swap(p[i - 1], p[j]);
  }
  return p;
}

}  // namespace pm25
