#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pm25/dataset/timestamp.hpp"

namespace pm25::dataset {

struct ImageRecord {
  std::filesystem::path image_path;
  Timestamp captured_at;
  std::string location;
  double pm25_label = 0.0;  // AQI scale, [0, 500]
  std::optional<double> humidity;
  std::size_t line = 0;  // manifest line, 0 when not read from a file
};

// Throws DataError when the label or humidity is out of range.
void validate(const ImageRecord& record);

std::vector<double> labels(std::span<const ImageRecord> records);

struct SplitPlan {
  std::uint64_t seed = 0;
  std::vector<std::size_t> train, val, test;
};

enum class SplitOrder { Random, Chronological };

// Sizes: train = round(0.81 n), test = round(0.10 n) (halves up), val gets
// the rest. Random order uses a seeded Fisher-Yates shuffle; chronological
// order sorts by capture time (stable) and ignores the seed. Needs n >= 10.
SplitPlan split(std::size_t n, std::uint64_t seed);
SplitPlan split(std::span<const ImageRecord> records, std::uint64_t seed, SplitOrder order = SplitOrder::Random);

// k disjoint folds covering 0..n-1 after a seeded shuffle; the first n % k
// folds hold one extra index. Needs 2 <= k <= n.
std::vector<std::vector<std::size_t>> kfold(std::size_t n, std::size_t k, std::uint64_t seed);

struct HistogramBin {
  double lo = 0.0, hi = 0.0;  // [lo, hi), the last bin closed at 500
  std::size_t count = 0;
};

// Bins of `bin_width` over [0, 500]. Throws DomainError for a label outside
// that range or a non-positive width.
std::vector<HistogramBin> histogram(std::span<const double> values, double bin_width = 50.0);
std::vector<HistogramBin> histogram(std::span<const ImageRecord> records, double bin_width = 50.0);

void write_histogram_csv(std::span<const HistogramBin> bins, const std::filesystem::path& path);

}  // namespace pm25::dataset
