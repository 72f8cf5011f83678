#include "bss/timeutil.hpp"

#include <array>
#include <cstdio>

namespace bss::timeutil {

namespace {

constexpr std::int64_t kSecondsPerDay = 86400;

// Floor division/modulo for possibly-negative day counts.
std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  return (a >= 0) ? a / b : -((-a + b - 1) / b);
}

std::int64_t floor_mod(std::int64_t a, std::int64_t b) {
  return a - floor_div(a, b) * b;
}

bool is_leap(int y) { return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0); }

int days_in_month(int y, int m) {
  static constexpr std::array<int, 12> kDays = {31, 28, 31, 30, 31, 30,
                                                31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) return 29;
  return kDays[m - 1];
}

}  // namespace

// Howard Hinnant's algorithm (public domain).
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& year, int& month, int& day) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  day = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  month = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  year = static_cast<int>(y + (month <= 2));
}

std::optional<Timestamp> parse_iso8601(std::string_view text) {
  // Shapes: 16 chars "YYYY-MM-DDTHH:MM" or 19 chars with ":SS".
  if (text.size() != 16 && text.size() != 19) return std::nullopt;

  auto digit = [&](std::size_t i) -> int {
    char c = text[i];
    return (c >= '0' && c <= '9') ? c - '0' : -1;
  };
  auto num2 = [&](std::size_t i) -> int {
    int a = digit(i), b = digit(i + 1);
    return (a < 0 || b < 0) ? -1 : a * 10 + b;
  };

  int y = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    int d = digit(i);
    if (d < 0) return std::nullopt;
    y = y * 10 + d;
  }
  if (text[4] != '-' || text[7] != '-') return std::nullopt;
  if (text[10] != 'T' && text[10] != ' ') return std::nullopt;
  if (text[13] != ':') return std::nullopt;

  const int mo = num2(5), da = num2(8), hh = num2(11), mi = num2(14);
  int ss = 0;
  if (text.size() == 19) {
    if (text[16] != ':') return std::nullopt;
    ss = num2(17);
  }
  if (mo < 1 || mo > 12 || da < 1) return std::nullopt;
  if (da > days_in_month(y, mo)) return std::nullopt;
  if (hh < 0 || hh > 23 || mi < 0 || mi > 59 || ss < 0 || ss > 59) return std::nullopt;

  const std::int64_t days = days_from_civil(y, mo, da);
  return Timestamp{days * kSecondsPerDay + hh * 3600 + mi * 60 + ss};
}

std::string to_iso8601(Timestamp t) {
  const std::int64_t days = floor_div(t.seconds, kSecondsPerDay);
  const std::int64_t sod = floor_mod(t.seconds, kSecondsPerDay);
  int y, m, d;
  civil_from_days(days, y, m, d);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02lld:%02lld:%02lld", y, m, d,
                static_cast<long long>(sod / 3600),
                static_cast<long long>(sod / 60 % 60),
                static_cast<long long>(sod % 60));
  return buf;
}

int weekday_monday0(Timestamp t) {
  const std::int64_t days = floor_div(t.seconds, kSecondsPerDay);
  // 1970-01-01 was a Thursday (index 3 when Monday = 0).
  return static_cast<int>(floor_mod(days + 3, 7));
}

int hour_of_day(Timestamp t) {
  return static_cast<int>(floor_mod(t.seconds, kSecondsPerDay) / 3600);
}

}  // namespace bss::timeutil
