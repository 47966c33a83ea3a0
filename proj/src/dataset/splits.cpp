#include <algorithm>
#include <numeric>
#include <random>
#include <string>

#include "pm25/dataset/records.hpp"
#include "pm25/errors.hpp"
#include "pm25/random.hpp"

namespace pm25::dataset {

namespace {

SplitPlan cut(const std::vector<std::size_t>& order, std::uint64_t seed) {
  const std::size_t n = order.size();
  const std::size_t train = (81 * n + 50) / 100;
  const std::size_t test = (n + 5) / 10;
  SplitPlan p;
  p.seed = seed;
  p.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(train));
  p.val.assign(order.begin() + static_cast<std::ptrdiff_t>(train),
               order.begin() + static_cast<std::ptrdiff_t>(n - test));
  p.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n - test), order.end());
  return p;
}

void check_count(std::size_t n) {
  if (n < 10) throw DataError("a split needs at least 10 records, got " + std::to_string(n));
}

}  // namespace

SplitPlan split(std::size_t n, std::uint64_t seed) {
  check_count(n);
  std::mt19937_64 rng(seed);
  return cut(permutation(n, rng), seed);
}

SplitPlan split(std::span<const ImageRecord> records, std::uint64_t seed, SplitOrder order) {
  if (order == SplitOrder::Random) return split(records.size(), seed);
  check_count(records.size());
  std::vector<std::size_t> idx(records.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return records[a].captured_at < records[b].captured_at; });
  return cut(idx, seed);
}

std::vector<std::vector<std::size_t>> kfold(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw DomainError("k-fold needs k >= 2, got " + std::to_string(k));
  if (k > n) throw DomainError("k-fold with k = " + std::to_string(k) + " exceeds the " + std::to_string(n) + " records");
  std::mt19937_64 rng(seed);
  const auto order = permutation(n, rng);
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = n / k + (f < n % k ? 1 : 0);
    folds[f].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                    order.begin() + static_cast<std::ptrdiff_t>(pos + size));
    pos += size;
  }
  return folds;
}

}  // namespace pm25::dataset
