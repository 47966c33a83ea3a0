#include "pm25/dataset/labeling.hpp"

#include <cmath>

#include "csv.hpp"
#include "pm25/errors.hpp"

namespace pm25::dataset {

void HourlyReadings::add(Timestamp hour, double pm25) {
  if (hour.minute() != 0) throw DataError("reading time " + hour.iso() + " is not on the hour");
  if (!(pm25 >= 0.0 && pm25 <= kAqiMax)) {
    throw DataError("reading at " + hour.iso() + " is outside [0, 500]: " + std::to_string(pm25));
  }
  if (!by_hour_.emplace(hour.minutes(), pm25).second) throw DataError("duplicate reading for " + hour.iso());
}

const double* HourlyReadings::find(Timestamp hour) const {
  const auto it = by_hour_.find(hour.minutes());
  return it == by_hour_.end() ? nullptr : &it->second;
}

HourlyReadings load_readings_csv(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  const std::size_t hour_col = table.column("hour_iso");
  const std::size_t value_col = table.column("pm25");
  HourlyReadings r;
  for (const auto& row : table.rows) {
    const std::string where = path.string() + ":" + std::to_string(row.line) + ": ";
    try {
      r.add(parse_timestamp(row.field(hour_col)), parse_number(row.field(value_col)));
    } catch (const DataError& e) {
      throw DataError(where + e.what());
    }
  }
  return r;
}

double assign_label(Timestamp captured_at, const HourlyReadings& readings) {
  Timestamp hour = captured_at.floor_hour();
  if (captured_at.minute() > 30) hour = hour.plus_minutes(60);
  const double* v = readings.find(hour);
  if (!v) {
    throw DataError("no hourly reading for " + hour.iso() + " (needed to label a capture at " + captured_at.iso() +
                    ")");
  }
  return *v;
}

const std::array<AqiCategory, 6>& aqi_table() {
  static const std::array<AqiCategory, 6> table{{
      {0, 50, "Good", "Green"},
      {51, 100, "Moderate", "Yellow Green"},
      {101, 150, "Caution", "Yellow"},
      {151, 200, "Unhealthy", "Orange"},
      {201, 300, "Very Unhealthy", "Red"},
      {301, 500, "Extremely Unhealthy", "Purple"},
  }};
  return table;
}

const AqiCategory& aqi_category(double aqi) {
  if (!(aqi >= 0.0 && aqi <= kAqiMax)) throw DomainError("AQI must lie in [0, 500], got " + std::to_string(aqi));
  const int v = static_cast<int>(std::floor(aqi + 0.5));
  for (const auto& row : aqi_table()) {
    if (v >= row.lo && v <= row.hi) return row;
  }
  throw DomainError("AQI " + std::to_string(aqi) + " falls in no category");
}

}  // namespace pm25::dataset
