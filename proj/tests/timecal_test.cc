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

#include <doctest.h>

#include "smokearchive/timecal.h"
#include "smokearchive/error.h"
#include "support.h"

using namespace smokearchive;
using namespace std::chrono;
using smokearchive::testing::oracle_julian;

namespace {

Instant at(int y, unsigned m, unsigned d, int h = 0, int mi = 0, int s = 0) {
  return sys_days{year{y} / m / d} + hours{h} + minutes{mi} + seconds{s};
}

std::string failing_field(JulianStamp s) {
  try {
    julian_to_calendar(s);
  } catch (const EncodingError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST_CASE("julian examples") {
  CHECK(julian_to_calendar({2021063, 0}) == at(2021, 3, 4));
  CHECK(calendar_to_julian(at(2021, 3, 4)) == JulianStamp{2021063, 0});
  CHECK(julian_to_calendar({2024366, 0}) == at(2024, 12, 31));
  CHECK(julian_to_calendar({2024060, 0}) == at(2024, 2, 29));
  CHECK(julian_to_calendar({2023135, 183015}) == at(2023, 5, 15, 18, 30, 15));
  CHECK(calendar_to_julian(at(2023, 12, 31, 23, 59, 59)) == JulianStamp{2023365, 235959});
}

TEST_CASE("malformed stamps name the field") {
  CHECK(failing_field({2023366, 0}) == "day_of_year");
  CHECK(failing_field({2023000, 0}) == "day_of_year");
  CHECK(failing_field({2023001, 240000}) == "hour");
  CHECK(failing_field({2023001, 126000}) == "minute");
  CHECK(failing_field({2023001, 120060}) == "second");
  CHECK(failing_field({0, 0}) == "date");
  CHECK_FALSE(is_valid({2023366, 0}));
  CHECK(is_valid({2024366, 0}));
}

TEST_CASE("round trip against month-table oracle, 2019-2026") {
  int mismatches = 0;
  for (auto d = sys_days{2019y / 1 / 1}; d <= sys_days{2026y / 12 / 31}; d += days{1}) {
    const year_month_day ymd{d};
    for (int h = 0; h < 24; h += 7) {
      const auto expect = oracle_julian(static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                                        static_cast<unsigned>(ymd.day()), h);
      const Instant t = d + hours{h};
      if (calendar_to_julian(t) != expect || julian_to_calendar(expect) != t) ++mismatches;
    }
  }
  CHECK(mismatches == 0);
}

TEST_CASE("HourStep") {
  const auto t = HourStep::from_instant(at(2023, 5, 15, 6));
  CHECK((t + hours{18}).instant() == at(2023, 5, 16));
  CHECK((t - HourStep::from_date(sys_days{2023y / 5 / 15})) == hours{6});
  CHECK_THROWS_AS(HourStep::from_instant(at(2023, 5, 15, 6, 30)), RangeError);
  CHECK_THROWS_AS(HourStep::from_instant(at(2023, 5, 15, 6, 0, 1)), RangeError);
}

TEST_CASE("hour_range") {
  const auto a = HourStep::from_date(sys_days{2023y / 5 / 15});
  CHECK(hour_range(a, a).size() == 1);
  CHECK(hour_range(a, a + hours{167}).size() == 168);
  CHECK(hour_range(a, a + hours{167}).back() == a + hours{167});
  CHECK_THROWS_AS(hour_range(a + hours{1}, a), RangeError);
}

TEST_CASE("ISO 8601") {
  CHECK(format_iso(at(2023, 5, 15, 18)) == "2023-05-15T18:00:00Z");
  CHECK(parse_iso("2023-05-15T18:00:00Z") == at(2023, 5, 15, 18));
  CHECK(parse_iso("2023-05-15T18:00Z") == at(2023, 5, 15, 18));
  CHECK(parse_iso("2023-05-15T12:00:00-06:00") == at(2023, 5, 15, 18));
  CHECK(parse_iso("2023-05-16T01:30:00+05:30") == at(2023, 5, 15, 20));
  CHECK(parse_iso("2023-05-15") == at(2023, 5, 15));
  CHECK(parse_date("2024-02-29") == sys_days{2024y / 2 / 29});
  CHECK(format_date(sys_days{2024y / 2 / 29}) == "2024-02-29");
  CHECK(format_compact_date(sys_days{2024y / 2 / 9}) == "20240209");
  CHECK_THROWS_AS(parse_iso("2023-02-29"), EncodingError);
  CHECK_THROWS_AS(parse_iso("2023-05-15T18:00:00"), EncodingError);
  CHECK_THROWS_AS(parse_iso("2023-05-15T25:00:00Z"), EncodingError);
  CHECK_THROWS_AS(parse_iso("2023/05/15"), EncodingError);
  CHECK_THROWS_AS(parse_hour("2023-05-15T18:30:00Z"), RangeError);
  for (int i = 0; i < 1000; ++i) {
    const Instant t = at(2020, 1, 1) + seconds{i * 98765LL};
    CHECK(parse_iso(format_iso(t)) == t);
  }
}
