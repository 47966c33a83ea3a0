#include "pm25/dataset/timestamp.hpp"

#include <chrono>
#include <cstdio>

#include "pm25/errors.hpp"

namespace pm25::dataset {

namespace {

constexpr std::int64_t kDay = 24 * 60;

std::int64_t floor_mod(std::int64_t a, std::int64_t b) { return ((a % b) + b) % b; }

bool digits(std::string_view s, std::size_t pos, std::size_t n, int& out) {
  out = 0;
  for (std::size_t i = pos; i < pos + n; ++i) {
    if (i >= s.size() || s[i] < '0' || s[i] > '9') return false;
    out = out * 10 + (s[i] - '0');
  }
  return true;
}

}  // namespace

Timestamp Timestamp::from_fields(int year, int month, int day, int hour, int minute) {
  using namespace std::chrono;
  const year_month_day ymd{std::chrono::year(year), std::chrono::month(static_cast<unsigned>(month)),
                           std::chrono::day(static_cast<unsigned>(day))};
  if (month < 1 || month > 12 || day < 1 || !ymd.ok()) {
    throw DataError("invalid date " + std::to_string(year) + "-" + std::to_string(month) + "-" + std::to_string(day));
  }
  if (hour < 0 || hour > 23 || minute < 0 || minute > 59) {
    throw DataError("invalid time " + std::to_string(hour) + ":" + std::to_string(minute));
  }
  const std::int64_t days = sys_days(ymd).time_since_epoch().count();
  return Timestamp(days * kDay + hour * 60 + minute);
}

int Timestamp::hour() const { return static_cast<int>(floor_mod(minutes_, kDay) / 60); }
int Timestamp::minute() const { return static_cast<int>(floor_mod(minutes_, 60)); }

std::string Timestamp::iso() const {
  using namespace std::chrono;
  const std::int64_t days = (minutes_ - floor_mod(minutes_, kDay)) / kDay;
  const year_month_day ymd{sys_days(std::chrono::days(days))};
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), hour(), minute());
  return buf;
}

Timestamp parse_timestamp(std::string_view text) {
  const auto fail = [&] { return DataError("unparseable timestamp '" + std::string(text) + "'"); };
  int y, mo, d, h, mi, s;
  if (text.size() != 16 && text.size() != 19) throw fail();
  if (!digits(text, 0, 4, y) || text[4] != '-' || !digits(text, 5, 2, mo) || text[7] != '-' ||
      !digits(text, 8, 2, d) || (text[10] != 'T' && text[10] != ' ') || !digits(text, 11, 2, h) ||
      text[13] != ':' || !digits(text, 14, 2, mi)) {
    throw fail();
  }
  if (text.size() == 19 && (text[16] != ':' || !digits(text, 17, 2, s) || s > 59)) throw fail();
  try {
    return Timestamp::from_fields(y, mo, d, h, mi);
  } catch (const DataError& e) {
    throw DataError("unparseable timestamp '" + std::string(text) + "': " + e.what());
  }
}

}  // namespace pm25::dataset
