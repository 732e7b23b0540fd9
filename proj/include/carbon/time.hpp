#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace carbon {

inline constexpr std::int64_t kSecondsPerMinute = 60;
inline constexpr std::int64_t kSecondsPerDay = 86'400;
inline constexpr int kMinutesPerDay = 1'440;
inline constexpr int kWindowMinutes = 5;
inline constexpr int kWindowsPerDay = kMinutesPerDay / kWindowMinutes;

// UTC instant at second resolution, stored as seconds since the Unix epoch.
// Canonical text form is `YYYY-MM-DDTHH:MM:SSZ`.
struct Timestamp {
  std::int64_t seconds = 0;

  static Timestamp parse(std::string_view text);  // throws Error(kParse)
  std::string to_string() const;

  int second_of_minute() const;
  std::int64_t second_of_day() const;

  Timestamp operator+(std::int64_t delta) const { return Timestamp{seconds + delta}; }
  std::int64_t operator-(Timestamp other) const { return seconds - other.seconds; }
  auto operator<=>(const Timestamp&) const = default;
};

// Civil UTC date.
class Date {
 public:
  Date() = default;
  explicit Date(std::chrono::year_month_day ymd);

  static Date parse(std::string_view text);  // `YYYY-MM-DD`; throws Error(kParse)

  std::string to_string() const;  // YYYY-MM-DD
  std::string compact() const;    // YYYYMMDD
  Timestamp midnight() const;
  Date next() const;

  static Date of(Timestamp ts);

  auto operator<=>(const Date&) const = default;

 private:
  std::int64_t days_since_epoch_ = 0;
};

Timestamp align_to_minute(Timestamp ts);

// Index of the five-minute window containing a minute-aligned timestamp.
// Throws Error(kNonAligned) when ts carries seconds.
int window_index(Timestamp minute_start);

// `HH:MM` of the minute containing ts.
std::string minute_label(Timestamp ts);

}  // namespace carbon
