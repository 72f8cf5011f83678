#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace bss::timeutil {

// A wall-clock instant in the dataset's (implicit) local zone, stored as
// seconds since 1970-01-01T00:00:00 of that same zone. No zone conversion is
// ever applied; weekday and hour are derived by civil-calendar arithmetic.
struct Timestamp {
  std::int64_t seconds = 0;

  friend constexpr auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

// Days since 1970-01-01 for a civil date (proleptic Gregorian).
std::int64_t days_from_civil(int year, int month, int day);

// Inverse of days_from_civil.
void civil_from_days(std::int64_t days, int& year, int& month, int& day);

// Accepts "YYYY-MM-DDTHH:MM:SS", "YYYY-MM-DD HH:MM:SS" and the same without
// seconds. Returns nullopt for anything else (bad shape, out-of-range fields).
std::optional<Timestamp> parse_iso8601(std::string_view text);

// Canonical "YYYY-MM-DDTHH:MM:SS".
std::string to_iso8601(Timestamp t);

// 0 = Monday ... 6 = Sunday.
int weekday_monday0(Timestamp t);

// 0..23.
int hour_of_day(Timestamp t);

}  // namespace bss::timeutil
