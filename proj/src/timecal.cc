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

#include "smokearchive/timecal.h"

#include <charconv>

#include <fmt/format.h>

#include "smokearchive/error.h"

namespace smokearchive {

using namespace std::chrono;

namespace {

bool is_leap(int y) { return year{y}.is_leap(); }

int parse_fixed(std::string_view text, std::size_t pos, std::size_t width, std::string_view field,
                std::string_view whole) {
  if (pos + width > text.size()) {
    throw EncodingError(std::string(field), fmt::format("'{}': missing {}", whole, field));
  }
  int value = 0;
  const char* first = text.data() + pos;
  auto [ptr, ec] = std::from_chars(first, first + width, value);
  if (ec != std::errc{} || ptr != first + width) {
    throw EncodingError(std::string(field), fmt::format("'{}': bad {}", whole, field));
  }
  return value;
}

void expect_char(std::string_view text, std::size_t pos, char c, std::string_view whole) {
  if (pos >= text.size() || text[pos] != c) {
    throw EncodingError("separator", fmt::format("'{}': expected '{}' at position {}", whole, c, pos));
  }
}

Date checked_date(int y, int m, int d, std::string_view whole) {
  year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw EncodingError("date", fmt::format("'{}': not a calendar date", whole));
  return sys_days{ymd};
}

}  // namespace

bool is_valid(JulianStamp stamp) noexcept {
  const auto y = static_cast<int>(stamp.date / 1000);
  const auto doy = stamp.date % 1000;
  if (y < 1 || y > 9999 || doy < 1 || doy > (is_leap(y) ? 366u : 365u)) return false;
  return stamp.time / 10000 <= 23 && (stamp.time / 100) % 100 <= 59 && stamp.time % 100 <= 59;
}

Instant julian_to_calendar(JulianStamp stamp) {
  const auto y = static_cast<int>(stamp.date / 1000);
  const auto doy = stamp.date % 1000;
  if (y < 1 || y > 9999) {
    throw EncodingError("date", fmt::format("date {}: year out of range", stamp.date));
  }
  if (doy < 1 || doy > (is_leap(y) ? 366u : 365u)) {
    throw EncodingError("day_of_year", fmt::format("date {}: day-of-year {} invalid for {}", stamp.date, doy, y));
  }
  const unsigned hh = stamp.time / 10000, mm = (stamp.time / 100) % 100, ss = stamp.time % 100;
  if (hh > 23) throw EncodingError("hour", fmt::format("time {:06}: hour {} out of range", stamp.time, hh));
  if (mm > 59) throw EncodingError("minute", fmt::format("time {:06}: minute {} out of range", stamp.time, mm));
  if (ss > 59) throw EncodingError("second", fmt::format("time {:06}: second {} out of range", stamp.time, ss));
  const sys_days jan1{year{y} / January / 1};
  return jan1 + days{doy - 1} + hours{hh} + minutes{mm} + seconds{ss};
}

JulianStamp calendar_to_julian(Instant instant) {
  const auto day_start = floor<days>(instant);
  const year_month_day ymd{day_start};
  const sys_days jan1{ymd.year() / January / 1};
  const auto doy = static_cast<std::uint32_t>((day_start - jan1).count() + 1);
  const hh_mm_ss hms{instant - day_start};
  JulianStamp out;
  out.date = static_cast<std::uint32_t>(static_cast<int>(ymd.year())) * 1000 + doy;
  out.time = static_cast<std::uint32_t>(hms.hours().count() * 10000 + hms.minutes().count() * 100 +
                                        hms.seconds().count());
  return out;
}

HourStep HourStep::from_instant(Instant instant) {
  const auto h = std::chrono::floor<std::chrono::hours>(instant);
  if (h != instant) {
    throw RangeError("timecal", fmt::format("{} is not on an hour boundary", format_iso(instant)));
  }
  return HourStep(h);
}

HourStep HourStep::from_date(Date date, int hour) { return HourStep(date + std::chrono::hours{hour}); }

std::vector<HourStep> hour_range(HourStep start, HourStep end) {
  if (start > end) {
    throw RangeError("timecal", fmt::format("hour range start {} is after end {}", format_iso(start),
                                            format_iso(end)));
  }
  std::vector<HourStep> out;
  out.reserve(static_cast<std::size_t>((end - start).count()) + 1);
  for (auto t = start; t <= end; t = t + hours{1}) out.push_back(t);
  return out;
}

std::string format_iso(Instant instant) {
  const auto day_start = floor<days>(instant);
  const year_month_day ymd{day_start};
  const hh_mm_ss hms{instant - day_start};
  return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}Z", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                     hms.hours().count(), hms.minutes().count(), hms.seconds().count());
}

Instant parse_iso(std::string_view text) {
  const int y = parse_fixed(text, 0, 4, "year", text);
  expect_char(text, 4, '-', text);
  const int mo = parse_fixed(text, 5, 2, "month", text);
  expect_char(text, 7, '-', text);
  const int d = parse_fixed(text, 8, 2, "day", text);
  const Date date = checked_date(y, mo, d, text);
  if (text.size() == 10) return Instant{date};

  if (text[10] != 'T' && text[10] != ' ') expect_char(text, 10, 'T', text);
  const int hh = parse_fixed(text, 11, 2, "hour", text);
  expect_char(text, 13, ':', text);
  const int mm = parse_fixed(text, 14, 2, "minute", text);
  std::size_t pos = 16;
  int ss = 0;
  if (pos < text.size() && text[pos] == ':') {
    ss = parse_fixed(text, pos + 1, 2, "second", text);
    pos += 3;
  }
  if (hh > 23) throw EncodingError("hour", fmt::format("'{}': hour out of range", text));
  if (mm > 59) throw EncodingError("minute", fmt::format("'{}': minute out of range", text));
  if (ss > 59) throw EncodingError("second", fmt::format("'{}': second out of range", text));

  Instant local = Instant{date} + hours{hh} + minutes{mm} + seconds{ss};
  if (pos == text.size()) {
    throw EncodingError("offset", fmt::format("'{}': missing UTC designator", text));
  }
  if (text[pos] == 'Z' && pos + 1 == text.size()) return local;
  if ((text[pos] == '+' || text[pos] == '-') && pos + 6 == text.size()) {
    const int oh = parse_fixed(text, pos + 1, 2, "offset", text);
    expect_char(text, pos + 3, ':', text);
    const int om = parse_fixed(text, pos + 4, 2, "offset", text);
    const seconds offset = hours{oh} + minutes{om};
    // local = utc + offset
    return text[pos] == '+' ? local - offset : local + offset;
  }
  throw EncodingError("offset", fmt::format("'{}': bad UTC offset", text));
}

HourStep parse_hour(std::string_view text) { return HourStep::from_instant(parse_iso(text)); }

std::string format_date(Date date) {
  const year_month_day ymd{date};
  return fmt::format("{:04}-{:02}-{:02}", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                     static_cast<unsigned>(ymd.day()));
}

std::string format_compact_date(Date date) {
  const year_month_day ymd{date};
  return fmt::format("{:04}{:02}{:02}", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                     static_cast<unsigned>(ymd.day()));
}

Date parse_date(std::string_view text) {
  if (text.size() != 10) throw EncodingError("date", fmt::format("'{}': expected YYYY-MM-DD", text));
  return date_of(parse_iso(text));
}

}  // namespace smokearchive
