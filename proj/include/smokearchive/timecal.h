// Copyright 2026 The smokearchive Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace smokearchive {

/// Second-resolution UTC instant.
using Instant = std::chrono::sys_seconds;
using Date = std::chrono::sys_days;

/// Date in YYYYDDD form plus time of day in HHMMSS form, both UTC.
struct JulianStamp {
  std::uint32_t date = 0;
  std::uint32_t time = 0;

  friend auto operator<=>(const JulianStamp&, const JulianStamp&) = default;
};

bool is_valid(JulianStamp stamp) noexcept;

/// An instant on an exact UTC hour boundary.
class HourStep {
 public:
  using Hours = std::chrono::sys_time<std::chrono::hours>;

  constexpr HourStep() = default;
  constexpr explicit HourStep(Hours value) : value_(value) {}

  /// Throws RangeError unless `instant` has zero minutes and seconds.
  static HourStep from_instant(Instant instant);
  static HourStep from_date(Date date, int hour = 0);

  constexpr Hours hours() const { return value_; }
  Instant instant() const { return std::chrono::time_point_cast<std::chrono::seconds>(value_); }

  HourStep operator+(std::chrono::hours h) const { return HourStep(value_ + h); }
  HourStep operator-(std::chrono::hours h) const { return HourStep(value_ - h); }
  std::chrono::hours operator-(HourStep other) const { return value_ - other.value_; }

  friend constexpr auto operator<=>(const HourStep&, const HourStep&) = default;

 private:
  Hours value_{};
};

/// Throws EncodingError naming the offending field ("date", "day_of_year",
/// "hour", "minute" or "second").
Instant julian_to_calendar(JulianStamp stamp);
JulianStamp calendar_to_julian(Instant instant);

/// Inclusive hourly sequence; throws RangeError when start > end.
std::vector<HourStep> hour_range(HourStep start, HourStep end);

// ISO 8601 helpers. Formatting is always "YYYY-MM-DDTHH:MM:SSZ".
std::string format_iso(Instant instant);
inline std::string format_iso(HourStep step) { return format_iso(step.instant()); }
/// Accepts "YYYY-MM-DDTHH:MM[:SS]" followed by "Z" or a "+HH:MM"/"-HH:MM"
/// offset, or a bare "YYYY-MM-DD" (midnight UTC).
Instant parse_iso(std::string_view text);
HourStep parse_hour(std::string_view text);

std::string format_date(Date date);       // YYYY-MM-DD
std::string format_compact_date(Date date);  // YYYYMMDD
Date parse_date(std::string_view text);   // YYYY-MM-DD

inline Date date_of(Instant instant) { return std::chrono::floor<std::chrono::days>(instant); }

}  // namespace smokearchive
