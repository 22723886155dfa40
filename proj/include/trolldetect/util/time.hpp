#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

#include <fmt/format.h>

#include "trolldetect/util/error.hpp"

namespace trolldetect {

using Timestamp = std::chrono::sys_seconds;

namespace detail {

inline bool read_digits(std::string_view s, std::size_t pos, std::size_t n, int& out) {
  if (pos + n > s.size()) return false;
  int v = 0;
  for (std::size_t i = pos; i < pos + n; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    v = v * 10 + (s[i] - '0');
  }
  out = v;
  return true;
}

}  // namespace detail

/// Parses a UTC instant. Accepted forms:
///   YYYY-MM-DD
///   YYYY-MM-DD[T ]HH:MM[:SS[.fff]][Z|+00:00]
/// Fractional seconds are truncated. Non-UTC offsets are rejected.
inline Timestamp parse_timestamp(std::string_view s) {
  using namespace std::chrono;
  auto fail = [&]() -> Timestamp {
    throw ValidationError(fmt::format("invalid UTC timestamp '{}'", s));
  };
  int y = 0, mo = 0, d = 0, hh = 0, mm = 0, ss = 0;
  if (!detail::read_digits(s, 0, 4, y) || s.size() < 10 || s[4] != '-' ||
      !detail::read_digits(s, 5, 2, mo) || s[7] != '-' || !detail::read_digits(s, 8, 2, d)) {
    return fail();
  }
  std::size_t pos = 10;
  if (pos < s.size()) {
    if (s[pos] != 'T' && s[pos] != ' ') return fail();
    if (!detail::read_digits(s, pos + 1, 2, hh) || pos + 3 >= s.size() || s[pos + 3] != ':' ||
        !detail::read_digits(s, pos + 4, 2, mm)) {
      return fail();
    }
    pos += 6;
    if (pos < s.size() && s[pos] == ':') {
      if (!detail::read_digits(s, pos + 1, 2, ss)) return fail();
      pos += 3;
      if (pos < s.size() && s[pos] == '.') {
        ++pos;
        std::size_t start = pos;
        while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
        if (pos == start) return fail();
      }
    }
    std::string_view rest = s.substr(pos);
    if (!(rest.empty() || rest == "Z" || rest == "+00:00" || rest == "+0000")) return fail();
  }
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || hh > 23 || mm > 59 || ss > 60) return fail();
  return sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss};
}

inline std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  auto day = floor<days>(t);
  year_month_day ymd{day};
  hh_mm_ss hms{t - day};
  return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}Z", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                     hms.hours().count(), hms.minutes().count(), hms.seconds().count());
}

inline std::string format_date(Timestamp t) { return format_timestamp(t).substr(0, 10); }

/// Whole days from `from` to `to`, floored.
inline std::int64_t days_between(Timestamp from, Timestamp to) {
  return std::chrono::floor<std::chrono::days>(to - from).count();
}

/// Calendar day index (days since epoch) of an instant, in UTC.
inline std::int64_t utc_day(Timestamp t) {
  return std::chrono::floor<std::chrono::days>(t).time_since_epoch().count();
}

inline Timestamp default_reference_date() { return parse_timestamp("2019-01-01"); }

}  // namespace trolldetect
