#ifndef VIZCOT_COMMON_DATES_H_
#define VIZCOT_COMMON_DATES_H_

#include <chrono>
#include <cstdint>
#include <optional>
#include <string_view>

namespace vizcot {

/// A calendar timestamp from "YYYY-MM-DD" or "YYYY-MM-DD HH:MM:SS".
struct DateTime {
  std::chrono::year_month_day date;
  int hour = 0;
  int minute = 0;
  int second = 0;

  /// Seconds since 1970-01-01, proleptic Gregorian. Orders chronologically.
  std::int64_t epoch_seconds() const;
};

std::optional<DateTime> parse_iso_datetime(std::string_view s);

}  // namespace vizcot

#endif  // VIZCOT_COMMON_DATES_H_
