#include "pm25/dataset/records.hpp"

#include <cmath>
#include <fstream>

#include "pm25/dataset/labeling.hpp"
#include "pm25/errors.hpp"

namespace pm25::dataset {

void validate(const ImageRecord& r) {
  if (!(r.pm25_label >= 0.0 && r.pm25_label <= kAqiMax)) {
    throw DataError("pm25 label " + std::to_string(r.pm25_label) + " is outside [0, 500]");
  }
  if (r.humidity && !(*r.humidity >= 0.0 && *r.humidity <= 100.0)) {
    throw DataError("humidity " + std::to_string(*r.humidity) + " is outside [0, 100]");
  }
}

std::vector<double> labels(std::span<const ImageRecord> records) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.pm25_label);
  return out;
}

std::vector<HistogramBin> histogram(std::span<const double> values, double bin_width) {
  if (!(bin_width > 0.0) || !std::isfinite(bin_width)) throw DomainError("histogram bin width must be positive");
  const auto bins = static_cast<std::size_t>(std::ceil(kAqiMax / bin_width));
  std::vector<HistogramBin> out(bins);
  for (std::size_t i = 0; i < bins; ++i) {
    out[i].lo = static_cast<double>(i) * bin_width;
    out[i].hi = std::min(kAqiMax, static_cast<double>(i + 1) * bin_width);
  }
  for (double v : values) {
    if (!(v >= 0.0 && v <= kAqiMax)) throw DomainError("histogram value " + std::to_string(v) + " is outside [0, 500]");
    const auto i = std::min(bins - 1, static_cast<std::size_t>(std::floor(v / bin_width)));
    ++out[i].count;
  }
  return out;
}

std::vector<HistogramBin> histogram(std::span<const ImageRecord> records, double bin_width) {
  const auto v = labels(records);
  return histogram(std::span<const double>(v), bin_width);
}

void write_histogram_csv(std::span<const HistogramBin> bins, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "bin_lo,bin_hi,count\n";
  for (const auto& b : bins) out << b.lo << ',' << b.hi << ',' << b.count << '\n';
}

}  // namespace pm25::dataset
