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

#include "smokearchive/query.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "smokearchive/fsutil.h"

namespace smokearchive {

namespace {

constexpr double kSnap = 1e-9;

struct AxisPos {
  std::size_t i;
  double frac;
};

AxisPos locate(double x, double origin, double step, std::uint32_t n, std::string_view axis) {
  double f = (x - origin) / step;
  const double nearest = std::round(f);
  if (std::abs(f - nearest) <= kSnap) f = nearest;
  const double top = static_cast<double>(n - 1);
  if (!(f >= 0.0 && f <= top)) {
    throw ExtentError(fmt::format("{} {} outside grid ({} .. {})", axis, x, origin, origin + top * step));
  }
  const auto i = static_cast<std::size_t>(std::floor(f));
  return {i, f - static_cast<double>(i)};
}

void check_level(int level) {
  if (level != 0) throw ConfigError("query", fmt::format("sampling reads level 0 only, got level {}", level));
}

}  // namespace

std::string_view to_string(SamplingMode mode) {
  return mode == SamplingMode::southwest_corner ? "sw" : "bilinear";
}

SamplingMode parse_sampling_mode(std::string_view text) {
  if (text == "sw" || text == "southwest_corner") return SamplingMode::southwest_corner;
  if (text == "bilinear") return SamplingMode::bilinear;
  throw ConfigError("query", fmt::format("unknown sampling mode '{}' (sw|bilinear)", text));
}

GapError::GapError(const GapInfo& info)
    : Error("query", fmt::format("{} is a gap (previous covered {}, next covered {})", format_iso(info.t),
                                 info.previous_covered ? format_iso(*info.previous_covered) : "none",
                                 info.next_covered ? format_iso(*info.next_covered) : "none")),
      info_(info) {}

double sample_frame(const Frame& frame, double lat, double lon, SamplingMode mode) {
  const auto& g = frame.geometry;
  const auto row = locate(lat, g.lat0, g.dlat, g.nrows, "latitude");
  const auto col = locate(lon, g.lon0, g.dlon, g.ncols, "longitude");
  if (mode == SamplingMode::southwest_corner || (row.frac == 0.0 && col.frac == 0.0)) {
    return frame.at(row.i, col.i);
  }
  // On the last row or column the upper neighbour is never weighted.
  const std::size_t i1 = std::min<std::size_t>(row.i + 1, g.nrows - 1);
  const std::size_t j1 = std::min<std::size_t>(col.i + 1, g.ncols - 1);
  const double v00 = frame.at(row.i, col.i), v01 = frame.at(row.i, j1);
  const double v10 = frame.at(i1, col.i), v11 = frame.at(i1, j1);
  const double ty = row.frac, tx = col.frac;
  const double v = (1.0 - ty) * ((1.0 - tx) * v00 + tx * v01) + ty * ((1.0 - tx) * v10 + tx * v11);
  return std::clamp(v, std::min({v00, v01, v10, v11}), std::max({v00, v01, v10, v11}));
}

double sample_point(const Archive& archive, HourStep t, double lat, double lon, SamplingMode mode, int level) {
  check_level(level);
  // Extent is checked before touching the chunk.
  const auto g = archive.geometry(0);
  locate(lat, g.lat0, g.dlat, g.nrows, "latitude");
  locate(lon, g.lon0, g.dlon, g.ncols, "longitude");
  const auto read = archive.read_frame(t, 0);
  if (read.gap) throw GapError(*read.gap);
  return sample_frame(read.frame, lat, lon, mode);
}

Series sample_series(const Archive& archive, HourStep t0, HourStep t1, double lat, double lon, SamplingMode mode,
                     int level) {
  check_level(level);
  if (t0 > t1) throw RangeError("query", "series start after end");
  Series s;
  for (const auto t : hour_range(t0, t1)) {
    if (archive.in_range(t) && !archive.covered(t)) {
      s.gaps.push_back(t);
      continue;
    }
    s.values.emplace_back(t, sample_point(archive, t, lat, lon, mode));
  }
  return s;
}

std::string series_csv(const Series& series) {
  std::string out = "timestep_utc,pm25_ugm3\n";
  for (const auto& [t, v] : series.values) out += fmt::format("{},{}\n", format_iso(t), v);
  return out;
}

void write_series_csv(const Series& series, const std::filesystem::path& path) {
  atomic_write_text(path, series_csv(series));
}

}  // namespace smokearchive
