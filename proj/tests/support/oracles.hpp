#pragma once

// Independent reference computations for tests. Nothing here calls into the
// library under test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>

namespace oracle {

// Days since 1970-01-01 for a proleptic Gregorian date (H. Hinnant's
// days_from_civil).
inline std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline std::int64_t epoch_seconds(int y, unsigned mo, unsigned d, int h = 0, int mi = 0, int s = 0) {
  return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + s;
}

// E = P * t / 60000, evaluated as two separate steps in long double.
inline double energy_kwh(double watts, double minutes) {
  const long double watt_minutes = static_cast<long double>(watts) * static_cast<long double>(minutes);
  return static_cast<double>(watt_minutes / 60000.0L);
}

inline double co2_kg(double kwh, double factor) {
  return static_cast<double>(static_cast<long double>(kwh) * static_cast<long double>(factor));
}

inline bool rel_close(double a, double b, double tol) {
  const double scale = std::max({1e-300, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= tol * scale || std::abs(a - b) <= 1e-12;
}

inline std::string hex_bytes(const unsigned char* p, std::size_t n) {
  std::string out;
  char buf[3];
  for (std::size_t i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof(buf), "%02x", p[i]);
    out += buf;
  }
  return out;
}

}  // namespace oracle
