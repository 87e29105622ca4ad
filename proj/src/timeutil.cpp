#include "anxmap/timeutil.hpp"

#include <charconv>
#include <cstdio>

#include "anxmap/error.hpp"

namespace anxmap {

namespace {

bool read_int(std::string_view text, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > text.size()) return false;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (text[i] < '0' || text[i] > '9') return false;
  }
  auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, out);
  return ec == std::errc{} && ptr == text.data() + pos + len;
}

[[noreturn]] void bad(std::string_view text) {
  throw Error(ErrorCode::BadTimestamp, "expected ISO-8601 UTC, got '" + std::string(text) + "'");
}

}  // namespace

Instant parse_utc(std::string_view text) {
  // 0123456789012345678
  // YYYY-MM-DDTHH:MM:SS
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (text.size() < 20) bad(text);
  if (!read_int(text, 0, 4, y) || text[4] != '-' || !read_int(text, 5, 2, mo) || text[7] != '-' ||
      !read_int(text, 8, 2, d) || text[10] != 'T' || !read_int(text, 11, 2, h) || text[13] != ':' ||
      !read_int(text, 14, 2, mi) || text[16] != ':' || !read_int(text, 17, 2, s)) {
    bad(text);
  }
  const auto suffix = text.substr(19);
  if (suffix != "Z" && suffix != "+00:00") bad(text);
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59) bad(text);
  return std::chrono::sys_days{ymd} + std::chrono::hours{h} + std::chrono::minutes{mi} +
         std::chrono::seconds{s};
}

std::string format_utc(Instant t) {
  const auto day = std::chrono::floor<std::chrono::days>(t);
  const std::chrono::year_month_day ymd{day};
  const std::chrono::hh_mm_ss hms{t - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

TimeRange TimeRange::make(Instant from, Instant to) {
  if (!(from < to)) {
    throw Error(ErrorCode::BadRange, "time range needs from < to (" + format_utc(from) + " .. " +
                                         format_utc(to) + ")");
  }
  return {from, to};
}

}  // namespace anxmap
