#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace pm25::dataset {

// Wall-clock time at minute precision, stored as minutes since
// 1970-01-01T00:00 with no time zone attached.
class Timestamp {
 public:
  Timestamp() = default;
  static Timestamp from_minutes(std::int64_t minutes) { return Timestamp(minutes); }
  // Throws DataError for an invalid calendar date or time of day.
  static Timestamp from_fields(int year, int month, int day, int hour, int minute);

  std::int64_t minutes() const { return minutes_; }
  int hour() const;
  int minute() const;

  Timestamp floor_hour() const { return Timestamp(minutes_ - minute()); }
  Timestamp plus_minutes(std::int64_t m) const { return Timestamp(minutes_ + m); }

  // YYYY-MM-DDTHH:MM
  std::string iso() const;

  auto operator<=>(const Timestamp&) const = default;

 private:
  explicit Timestamp(std::int64_t m) : minutes_(m) {}
  std::int64_t minutes_ = 0;
};

// Accepts YYYY-MM-DDTHH:MM with an optional :SS (seconds are dropped) and a
// space in place of the T. Throws DataError otherwise.
Timestamp parse_timestamp(std::string_view text);

}  // namespace pm25::dataset
