#include "carbon/time.hpp"

#include <charconv>
#include <cstdio>

#include "carbon/errors.hpp"

namespace carbon {
namespace {

using std::chrono::day;
using std::chrono::days;
using std::chrono::month;
using std::chrono::sys_days;
using std::chrono::year;
using std::chrono::year_month_day;

int parse_digits(std::string_view text, std::size_t pos, std::size_t len, std::string_view whole) {
  int value = 0;
  if (pos + len > text.size()) throw Error(Errc::kParse, "truncated time value '" + std::string(whole) + "'");
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (text[i] < '0' || text[i] > '9') {
      throw Error(Errc::kParse, "non-digit in time value '" + std::string(whole) + "'");
    }
    value = value * 10 + (text[i] - '0');
  }
  return value;
}

void expect_char(std::string_view text, std::size_t pos, char c, std::string_view whole) {
  if (pos >= text.size() || text[pos] != c) {
    throw Error(Errc::kParse, "malformed time value '" + std::string(whole) + "'");
  }
}

year_month_day parse_ymd(std::string_view text, std::string_view whole) {
  const int y = parse_digits(text, 0, 4, whole);
  expect_char(text, 4, '-', whole);
  const int m = parse_digits(text, 5, 2, whole);
  expect_char(text, 7, '-', whole);
  const int d = parse_digits(text, 8, 2, whole);
  year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw Error(Errc::kParse, "invalid calendar date '" + std::string(whole) + "'");
  return ymd;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

Timestamp Timestamp::parse(std::string_view text) {
  if (text.size() != 20) throw Error(Errc::kParse, "timestamp must be YYYY-MM-DDTHH:MM:SSZ, got '" + std::string(text) + "'");
  const year_month_day ymd = parse_ymd(text.substr(0, 10), text);
  expect_char(text, 10, 'T', text);
  const int hh = parse_digits(text, 11, 2, text);
  expect_char(text, 13, ':', text);
  const int mm = parse_digits(text, 14, 2, text);
  expect_char(text, 16, ':', text);
  const int ss = parse_digits(text, 17, 2, text);
  expect_char(text, 19, 'Z', text);
  if (hh > 23 || mm > 59 || ss > 59) throw Error(Errc::kParse, "time of day out of range in '" + std::string(text) + "'");
  const std::int64_t d = sys_days{ymd}.time_since_epoch().count();
  return Timestamp{d * kSecondsPerDay + hh * 3600 + mm * 60 + ss};
}

std::string Timestamp::to_string() const {
  const std::int64_t d = floor_div(seconds, kSecondsPerDay);
  const std::int64_t sod = seconds - d * kSecondsPerDay;
  const year_month_day ymd{sys_days{days{d}}};
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(sod / 3600), static_cast<int>((sod / 60) % 60), static_cast<int>(sod % 60));
  return buf;
}

int Timestamp::second_of_minute() const {
  return static_cast<int>(seconds - floor_div(seconds, kSecondsPerMinute) * kSecondsPerMinute);
}

std::int64_t Timestamp::second_of_day() const {
  return seconds - floor_div(seconds, kSecondsPerDay) * kSecondsPerDay;
}

Date::Date(std::chrono::year_month_day ymd) : days_since_epoch_(sys_days{ymd}.time_since_epoch().count()) {}

Date Date::parse(std::string_view text) {
  if (text.size() != 10) throw Error(Errc::kParse, "date must be YYYY-MM-DD, got '" + std::string(text) + "'");
  return Date(parse_ymd(text, text));
}

std::string Date::to_string() const { return midnight().to_string().substr(0, 10); }

std::string Date::compact() const {
  std::string s = to_string();
  return s.substr(0, 4) + s.substr(5, 2) + s.substr(8, 2);
}

Timestamp Date::midnight() const { return Timestamp{days_since_epoch_ * kSecondsPerDay}; }

Date Date::next() const {
  Date d = *this;
  ++d.days_since_epoch_;
  return d;
}

Date Date::of(Timestamp ts) {
  Date d;
  d.days_since_epoch_ = floor_div(ts.seconds, kSecondsPerDay);
  return d;
}

Timestamp align_to_minute(Timestamp ts) {
  return Timestamp{floor_div(ts.seconds, kSecondsPerMinute) * kSecondsPerMinute};
}

int window_index(Timestamp minute_start) {
  if (minute_start.second_of_minute() != 0) {
    throw Error(Errc::kNonAligned, "timestamp " + minute_start.to_string() + " is not minute-aligned");
  }
  return static_cast<int>(minute_start.second_of_day() / kSecondsPerMinute / kWindowMinutes);
}

std::string minute_label(Timestamp ts) { return ts.to_string().substr(11, 5); }

}  // namespace carbon
