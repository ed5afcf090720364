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

#include "support.h"

#include <cstdlib>
#include <stdexcept>

namespace smokearchive::testing {

namespace fs = std::filesystem;

TempDir::TempDir() {
  std::string pattern = (fs::temp_directory_path() / "smokearchive-test-XXXXXX").string();
  if (!::mkdtemp(pattern.data())) throw std::runtime_error("mkdtemp failed");
  path_ = pattern;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

CorpusSpec small_spec(std::uint64_t seed, int days, Date start) {
  CorpusSpec spec;
  spec.seed = seed;
  spec.start_date = start;
  spec.end_date = start + std::chrono::days(days - 1);
  return spec;
}

JulianStamp oracle_julian(int year, unsigned month, unsigned day, int hour) {
  static constexpr unsigned kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
  unsigned doy = day;
  for (unsigned m = 1; m < month; ++m) doy += kDays[m - 1] + (m == 2 && leap ? 1 : 0);
  return {static_cast<std::uint32_t>(year) * 1000 + doy, static_cast<std::uint32_t>(hour) * 10000};
}

Archive make_archive(const fs::path& dir, const GridGeometry& geometry, HourStep start, int hours,
                     const FieldFn& field, const std::set<HourStep>& gaps, int levels) {
  ForecastGranule g;
  g.header.forecast_id = "TEST";
  g.header.smoke_init = calendar_to_julian(start.instant());
  g.header.weather_init = calendar_to_julian(start.instant() - std::chrono::hours{6});
  g.header.creation = calendar_to_julian(start.instant() + std::chrono::hours{2});
  g.header.geometry = geometry;
  g.header.ntimes = static_cast<std::uint32_t>(hours);
  for (int k = 0; k < hours; ++k) {
    const auto t = start + std::chrono::hours{k};
    g.tflag.push_back(calendar_to_julian(t.instant()));
    for (std::uint32_t r = 0; r < geometry.nrows; ++r) {
      for (std::uint32_t c = 0; c < geometry.ncols; ++c) {
        g.pm25.push_back(field(t, geometry.lat0 + r * geometry.dlat, geometry.lon0 + c * geometry.dlon));
      }
    }
  }
  write_granule_file(g, dir / "cache/TEST/test.gran");

  SequencePlan plan;
  plan.start = start;
  plan.end = start + std::chrono::hours{hours - 1};
  for (int k = 0; k < hours; ++k) {
    const auto t = start + std::chrono::hours{k};
    if (gaps.contains(t)) {
      plan.gaps.push_back(t);
      continue;
    }
    CandidateFrame c;
    c.path = "TEST/test.gran";
    c.forecast_id = "TEST";
    c.frame_index = static_cast<std::uint32_t>(k);
    c.smoke_init = start.instant();
    c.created = start.instant() + std::chrono::hours{2};
    c.geometry = geometry;
    plan.picks.emplace(t, c);
  }
  BuildOptions opts;
  opts.levels = levels;
  build_archive(plan, dir / "cache", geometry, dir / "archive", opts);
  return Archive::open(dir / "archive");
}

}  // namespace smokearchive::testing
