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

#include <cmath>

#include "smokearchive/corpusgen.h"
#include "smokearchive/fsutil.h"
#include "support.h"

using namespace smokearchive;
using namespace std::chrono;
using smokearchive::testing::small_spec;
using smokearchive::testing::TempDir;

TEST_CASE("forecast id init hours") {
  CHECK(init_hour_of("BSC00CA12-01") == 0);
  CHECK(init_hour_of("BSC18CA12-01") == 18);
  CHECK_FALSE(init_hour_of("BSC24CA12-01"));
  CHECK_FALSE(init_hour_of("FOO"));
}

TEST_CASE("schedule") {
  auto spec = small_spec(1, 10);
  CHECK(schedule_runs(spec).size() == 40);
  spec.every_id_every_init = true;
  CHECK(schedule_runs(spec).size() == 160);
  spec.forecast_ids = {"CUSTOM"};
  spec.every_id_every_init = false;
  CHECK(schedule_runs(spec).size() == 40);
  spec.start_date = spec.end_date + days{1};
  CHECK_THROWS_AS(schedule_runs(spec), ConfigError);
}

TEST_CASE("puff model") {
  const auto t = HourStep::from_date(sys_days{2023y / 5 / 15});
  FireSource f{50.0, -115.0, 100.0, t.instant()};
  const auto g = desk_geometry();
  const auto field = puff_field(std::span(&f, 1), Wind{}, t, g);
  // At ignition the puff peaks at the source.
  const auto peak = std::max_element(field.begin(), field.end());
  const auto idx = static_cast<std::size_t>(peak - field.begin());
  CHECK(g.lat0 + static_cast<double>(idx / g.ncols) * g.dlat == doctest::Approx(50.0));
  CHECK(g.lon0 + static_cast<double>(idx % g.ncols) * g.dlon == doctest::Approx(-115.0));
  CHECK(*peak == doctest::Approx(100.0));
  FireSource later = f;
  later.ignition = t.instant() + hours{1};
  CHECK_THROWS_AS(puff_field(std::span(&later, 1), Wind{}, t, g), RangeError);
  FireSource negative = f;
  negative.strength = -1;
  CHECK_THROWS_AS(puff_field(std::span(&negative, 1), Wind{}, t, g), RangeError);
  // Advection moves the centre downwind.
  const double after = puff_value(f, Wind{0.1, 0.0}, 10.0, 50.0, -114.0);
  const double upwind = puff_value(f, Wind{0.1, 0.0}, 10.0, 50.0, -116.0);
  CHECK(after > upwind);
}

TEST_CASE("granules follow the truth with bounded forecast error") {
  const auto spec = small_spec(5, 2);
  const TruthModel truth(spec);
  const auto runs = schedule_runs(spec);
  const auto g = make_granule(spec, truth, runs.front());
  CHECK(g.header.ntimes == 84);
  CHECK(julian_to_calendar(g.header.smoke_init) == runs.front().init);
  CHECK(julian_to_calendar(g.header.weather_init) == runs.front().init - hours{6});
  const auto created = julian_to_calendar(g.header.creation) - runs.front().init;
  CHECK(created >= hours{2});
  CHECK(created < hours{3});
  for (std::uint32_t lead = 0; lead < g.header.ntimes; ++lead) {
    const auto t = HourStep::from_instant(runs.front().init) + hours{lead};
    CHECK(julian_to_calendar(g.tflag[lead]) == t.instant());
    const auto ref = truth.field(t, g.header.geometry);
    const auto frame = g.frame(lead);
    const double bound = 0.02 * lead;
    for (std::size_t i = 0; i < frame.size(); i += 97) {
      CHECK(frame[i] >= 0.0f);
      CHECK(std::abs(frame[i] - ref[i]) <= bound * ref[i] + 1e-5 * ref[i] + 1e-6);
    }
  }
}

TEST_CASE("generated corpus is deterministic and independent of worker count") {
  TempDir a, b;
  auto spec = small_spec(42, 6);
  spec.faults = {0.2, 0.1, 0.1};
  const auto m1 = generate_corpus(spec, a / "c", 1);
  const auto m2 = generate_corpus(spec, b / "c", 4);
  REQUIRE(m1.runs.size() == m2.runs.size());
  for (std::size_t i = 0; i < m1.runs.size(); ++i) {
    CHECK(m1.runs[i].outcome == m2.runs[i].outcome);
    if (m1.runs[i].outcome == RunOutcome::missing) {
      CHECK_FALSE(std::filesystem::exists(a / "c" / m1.runs[i].path.string()));
      continue;
    }
    CHECK(read_file(a / "c" / m1.runs[i].path.string()) == read_file(b / "c" / m2.runs[i].path.string()));
  }
  CHECK(read_text_file(a / "c/manifest.csv") == read_text_file(b / "c/manifest.csv"));
  const auto back = read_manifest_csv(a / "c/manifest.csv");
  CHECK(back.runs.size() == m1.runs.size());
  CHECK(back.count(RunOutcome::missing) == m1.count(RunOutcome::missing));
  CHECK_THROWS_AS(generate_corpus(spec, a / "c"), IoError);
}

TEST_CASE("fault injection produces the declared file shapes") {
  TempDir dir;
  auto spec = small_spec(9, 20);
  spec.horizon_hours = 6;
  spec.faults = {0.3, 0.3, 0.3};
  const auto m = generate_corpus(spec, dir / "c", 2);
  CHECK(m.count(RunOutcome::missing) > 0);
  CHECK(m.count(RunOutcome::html) > 0);
  CHECK(m.count(RunOutcome::truncated) > 0);
  for (const auto& run : m.runs) {
    const auto path = dir / "c" / run.path.string();
    switch (run.outcome) {
      case RunOutcome::missing: CHECK_FALSE(std::filesystem::exists(path)); break;
      case RunOutcome::html: CHECK(read_text_file(path) == html_error_page()); break;
      case RunOutcome::truncated: {
        const auto size = std::filesystem::file_size(path);
        CHECK(size >= metadata_bytes(6));
        CHECK(size < metadata_bytes(6) + 6 * run.geometry.cells() * 4);
        break;
      }
      case RunOutcome::ok: CHECK_NOTHROW(parse_granule_file(path)); break;
    }
  }
  FaultProfile bad{1.5, 0, 0};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("drift schedule switches geometry at the cutoff") {
  auto spec = small_spec(3, 6);
  spec.drift = DriftSchedule{desk_drift_geometry(), spec.start_date + days{3}};
  for (const auto& run : schedule_runs(spec)) {
    const bool early = date_of(run.init) < spec.start_date + days{3};
    CHECK((run.geometry == (early ? desk_drift_geometry() : desk_geometry())));
  }
}

TEST_CASE("site synthesis") {
  auto spec = small_spec(11, 8);
  SiteSpec site;
  const auto obs = synthesize_site(spec, site, spec.start_date, spec.end_date);
  CHECK(obs.solar.size() == 8 * 96);
  CHECK(obs.cloud_pct.size() == 8);
  CHECK(obs.smoky.size() == 8);
  for (const auto& r : obs.solar) {
    CHECK(r.energy_kwh >= 0.0);
    CHECK(r.energy_kwh <= site.capacity_kw / 4.0 * 1.03 + 1e-9);
  }
  const auto again = synthesize_site(spec, site, spec.start_date, spec.end_date);
  CHECK(again.solar.size() == obs.solar.size());
  for (std::size_t i = 0; i < obs.solar.size(); ++i) CHECK(again.solar[i].energy_kwh == obs.solar[i].energy_kwh);

  TempDir dir;
  write_site_observations(obs, dir.path(), -6.0);
  const auto solar = read_text_file(dir / "solar.csv");
  CHECK(solar.rfind("timestamp_iso,energy_kwh\n", 0) == 0);
  CHECK(solar.find("-06:00,") != std::string::npos);
}

TEST_CASE("seed mixing") {
  CHECK(mix_seed(1, "a", 2) == mix_seed(1, "a", 2));
  CHECK(mix_seed(1, "a", 2) != mix_seed(1, "a", 3));
  CHECK(mix_seed(1, "a", 2) != mix_seed(1, "b", 2));
  CHECK(mix_seed(1, "a", 2) != mix_seed(2, "a", 2));
}
