#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>

#include "pm25/dataset/timestamp.hpp"

namespace pm25::dataset {

inline constexpr double kAqiMax = 500.0;

// Hourly PM2.5 readings on the AQI scale, at most one per hour.
class HourlyReadings {
 public:
  // `hour` must fall on the hour; duplicates and values outside [0, 500]
  // throw DataError.
  void add(Timestamp hour, double pm25);
  const double* find(Timestamp hour) const;
  std::size_t size() const { return by_hour_.size(); }
  const std::map<std::int64_t, double>& values() const { return by_hour_; }

 private:
  std::map<std::int64_t, double> by_hour_;
};

// CSV with header `hour_iso,pm25`.
HourlyReadings load_readings_csv(const std::filesystem::path& path);

// Reading of the capture's hour when the minute is <= 30, of the next hour
// otherwise. Throws DataError naming the hour when that reading is absent.
double assign_label(Timestamp captured_at, const HourlyReadings& readings);

struct AqiCategory {
  int lo = 0;
  int hi = 0;
  std::string name;
  std::string color;
};

const std::array<AqiCategory, 6>& aqi_table();

// Row containing round-half-up(aqi). Throws DomainError outside [0, 500].
const AqiCategory& aqi_category(double aqi);

}  // namespace pm25::dataset
