#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace anxmap {

using Instant = std::chrono::sys_seconds;

// "YYYY-MM-DDTHH:MM:SSZ" (a "+00:00" suffix is also accepted). Throws BadTimestamp.
Instant parse_utc(std::string_view text);
std::string format_utc(Instant t);

// Half-open [from, to).
struct TimeRange {
  Instant from;
  Instant to;

  // Throws BadRange unless from < to.
  static TimeRange make(Instant from, Instant to);
  bool contains(Instant t) const { return from <= t && t < to; }
};

}  // namespace anxmap
