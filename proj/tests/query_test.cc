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
#include <random>

#include "smokearchive/fsutil.h"
#include "smokearchive/query.h"
#include "support.h"

using namespace smokearchive;
using namespace std::chrono;
using smokearchive::testing::make_archive;
using smokearchive::testing::TempDir;

namespace {

const HourStep kStart = HourStep::from_date(sys_days{2023y / 5 / 15});

float bumpy(HourStep t, double lat, double lon) {
  return static_cast<float>(10.0 + 5.0 * std::sin(lat) * std::cos(lon / 3.0) +
                            0.1 * static_cast<double>((t - kStart).count()));
}

}  // namespace

TEST_CASE("mode parsing") {
  CHECK(parse_sampling_mode("sw") == SamplingMode::southwest_corner);
  CHECK(parse_sampling_mode("bilinear") == SamplingMode::bilinear);
  CHECK(to_string(SamplingMode::southwest_corner) == "sw");
  CHECK_THROWS_AS(parse_sampling_mode("nearest"), ConfigError);
}

TEST_CASE("corner values and the cell centre") {
  TempDir dir;
  const GridGeometry g{2, 2, 50.0, -115.0, 0.5, 0.5};
  // Corners: SW 1, SE 2, NW 3, NE 4.
  const auto archive = make_archive(dir.path(), g, kStart, 1, [](HourStep, double lat, double lon) {
    return static_cast<float>(1 + (lon > -115.0 ? 1 : 0) + (lat > 50.0 ? 2 : 0));
  });
  CHECK(sample_point(archive, kStart, 50.25, -114.75, SamplingMode::bilinear) == 2.5);
  CHECK(sample_point(archive, kStart, 50.25, -114.75, SamplingMode::southwest_corner) == 1.0);
  CHECK(sample_point(archive, kStart, 50.5, -114.5, SamplingMode::southwest_corner) == 4.0);
  CHECK(sample_point(archive, kStart, 50.5, -114.5, SamplingMode::bilinear) == 4.0);
  CHECK(sample_point(archive, kStart, 50.0, -114.5, SamplingMode::bilinear) == 2.0);
  CHECK(sample_point(archive, kStart, 50.499, -114.501, SamplingMode::southwest_corner) == 1.0);
  CHECK_THROWS_AS(sample_point(archive, kStart, 49.99, -114.75, SamplingMode::bilinear), ExtentError);
  CHECK_THROWS_AS(sample_point(archive, kStart, 50.2, -115.01, SamplingMode::southwest_corner), ExtentError);
  CHECK_THROWS_AS(sample_point(archive, kStart, 50.2, -114.7, SamplingMode::bilinear, 1), ConfigError);
}

TEST_CASE("modes agree on nodes of a 0.1 degree grid") {
  TempDir dir;
  const GridGeometry g{31, 41, 32.0, -160.0, 0.1, 0.1};
  const auto archive = make_archive(dir.path(), g, kStart, 1, bumpy);
  const auto frame = archive.read_frame(kStart).frame;
  for (std::uint32_t r = 0; r < g.nrows; ++r) {
    for (std::uint32_t c = 0; c < g.ncols; ++c) {
      const double lat = g.lat0 + r * g.dlat, lon = g.lon0 + c * g.dlon;
      const double sw = sample_frame(frame, lat, lon, SamplingMode::southwest_corner);
      const double bl = sample_frame(frame, lat, lon, SamplingMode::bilinear);
      CHECK(sw == frame.at(r, c));
      CHECK(bl == sw);
    }
  }
}

TEST_CASE("bilinear is bounded and continuous") {
  TempDir dir;
  const GridGeometry g{8, 9, 45.0, -125.0, 0.5, 0.5};
  const auto archive = make_archive(dir.path(), g, kStart, 1, bumpy);
  const auto frame = archive.read_frame(kStart).frame;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ulat(g.lat0, g.lat_max()), ulon(g.lon0, g.lon_max());
  for (int i = 0; i < 5000; ++i) {
    const double lat = ulat(rng), lon = ulon(rng);
    const auto r = std::min<std::size_t>(static_cast<std::size_t>((lat - g.lat0) / g.dlat), g.nrows - 2);
    const auto c = std::min<std::size_t>(static_cast<std::size_t>((lon - g.lon0) / g.dlon), g.ncols - 2);
    const double v = sample_frame(frame, lat, lon, SamplingMode::bilinear);
    CHECK(v >= std::min({frame.at(r, c), frame.at(r + 1, c), frame.at(r, c + 1), frame.at(r + 1, c + 1)}));
    CHECK(v <= std::max({frame.at(r, c), frame.at(r + 1, c), frame.at(r, c + 1), frame.at(r + 1, c + 1)}));
  }
  // Approach each interior column line from both sides.
  double worst = 0.0;
  for (std::uint32_t c = 1; c + 1 < g.ncols; ++c) {
    for (double lat = g.lat0; lat <= g.lat_max(); lat += 0.0137) {
      const double edge = g.lon0 + c * g.dlon;
      const double left = sample_frame(frame, lat, std::nextafter(edge, -1e9), SamplingMode::bilinear);
      const double right = sample_frame(frame, lat, edge, SamplingMode::bilinear);
      worst = std::max(worst, std::abs(left - right));
    }
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("series") {
  TempDir dir;
  const GridGeometry g{4, 4, 50.0, -115.0, 0.5, 0.5};
  const auto archive =
      make_archive(dir.path(), g, kStart, 168, bumpy, {kStart + hours{5}, kStart + hours{6}});
  const auto s = sample_series(archive, kStart, kStart + hours{167}, 50.7, -114.2, SamplingMode::bilinear);
  CHECK(s.values.size() == 166);
  CHECK(s.gaps == std::vector{kStart + hours{5}, kStart + hours{6}});
  for (const auto& [t, v] : s.values) CHECK(v == sample_point(archive, t, 50.7, -114.2, SamplingMode::bilinear));
  const auto one = sample_series(archive, kStart + hours{9}, kStart + hours{9}, 50.7, -114.2, SamplingMode::bilinear);
  REQUIRE(one.values.size() == 1);
  CHECK(one.values[0].second == sample_point(archive, kStart + hours{9}, 50.7, -114.2, SamplingMode::bilinear));
  try {
    sample_point(archive, kStart + hours{5}, 50.7, -114.2, SamplingMode::bilinear);
    FAIL("expected a gap");
  } catch (const GapError& e) {
    CHECK(e.info().previous_covered == kStart + hours{4});
    CHECK(e.info().next_covered == kStart + hours{7});
  }
  CHECK_THROWS_AS(sample_series(archive, kStart + hours{2}, kStart, 50.7, -114.2, SamplingMode::bilinear), RangeError);

  write_series_csv(one, dir / "s.csv");
  CHECK(read_text_file(dir / "s.csv").rfind("timestep_utc,pm25_ugm3\n2023-05-15T09:00:00Z,", 0) == 0);
}

TEST_CASE("constant archives give constant series in both modes") {
  TempDir dir;
  const auto archive =
      make_archive(dir.path(), GridGeometry{5, 5, 50, -115, 0.5, 0.5}, kStart, 24, [](HourStep, double, double) {
        return 12.5f;
      });
  for (auto mode : {SamplingMode::southwest_corner, SamplingMode::bilinear}) {
    for (const auto& [t, v] : sample_series(archive, kStart, kStart + hours{23}, 51.13, -114.07, mode).values) {
      CHECK(v == 12.5);
    }
  }
}
