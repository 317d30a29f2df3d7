#pragma once

#include <cstdint>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>

namespace gictk {

// All protocol math runs on signed 64-bit nanosecond counts so that the
// strict-inequality boundary checks are exact. Seconds appear only at I/O.
using TimeNs = std::int64_t;
using DurNs = std::int64_t;

inline constexpr DurNs kNsPerSec = 1'000'000'000;
inline constexpr TimeNs kNever = std::numeric_limits<TimeNs>::max();

inline constexpr double seconds(DurNs ns) {
  return static_cast<double>(ns) / static_cast<double>(kNsPerSec);
}

inline DurNs ns_from_seconds(double s) {
  double scaled = s * static_cast<double>(kNsPerSec);
  if (scaled >= static_cast<double>(std::numeric_limits<DurNs>::max()) ||
      scaled <= static_cast<double>(std::numeric_limits<DurNs>::min())) {
    throw std::out_of_range("seconds value does not fit in 64-bit nanoseconds");
  }
  return static_cast<DurNs>(std::llround(scaled));
}

// Exact decimal rendering of a nanosecond count as seconds, always with nine
// fractional digits. Used for CSV output so reruns are byte-identical.
inline std::string format_seconds(DurNs ns) {
  const bool neg = ns < 0;
  // Avoid overflow on INT64_MIN by splitting via unsigned magnitude.
  std::uint64_t mag = neg ? (~static_cast<std::uint64_t>(ns) + 1u)
                          : static_cast<std::uint64_t>(ns);
  const std::uint64_t whole = mag / static_cast<std::uint64_t>(kNsPerSec);
  const std::uint64_t frac = mag % static_cast<std::uint64_t>(kNsPerSec);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s%llu.%09llu", neg ? "-" : "",
                static_cast<unsigned long long>(whole),
                static_cast<unsigned long long>(frac));
  return buf;
}

}  // namespace gictk
