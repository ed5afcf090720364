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

#include "smokearchive/regrid.h"

#include <algorithm>
#include <cmath>
#include <optional>

#include <fmt/format.h>

namespace smokearchive {

namespace {

// Slack, in grid-index units, for target points that land on the source
// boundary up to rounding.
constexpr double kEdgeSlack = 1e-9;

/// Fractional source index for coordinate `x`, or nullopt when outside.
std::optional<std::pair<std::size_t, double>> locate(double x, double origin, double step, std::uint32_t n) {
  double f = (x - origin) / step;
  const double top = static_cast<double>(n - 1);
  if (f < -kEdgeSlack || f > top + kEdgeSlack) return std::nullopt;
  f = std::clamp(f, 0.0, top);
  const auto i = std::min(static_cast<std::size_t>(std::floor(f)), static_cast<std::size_t>(n - 2));
  return std::pair{i, f - static_cast<double>(i)};
}

}  // namespace

Frame Frame::from_floats(const GridGeometry& geometry, std::span<const float> values) {
  Frame f;
  f.geometry = geometry;
  f.values.assign(values.begin(), values.end());
  return f;
}

Frame bilinear_resample(const Frame& src, const GridGeometry& target) {
  const auto& sg = src.geometry;
  if (sg.nrows < 2 || sg.ncols < 2) {
    throw GeometryError(fmt::format("cannot interpolate from degenerate {}x{} grid", sg.nrows, sg.ncols));
  }
  if (src.values.size() != sg.cells()) {
    throw GeometryError(fmt::format("frame has {} values for a {}x{} grid", src.values.size(), sg.nrows, sg.ncols));
  }
  target.validate();

  Frame out;
  out.geometry = target;
  out.resampled = true;
  out.values.assign(target.cells(), 0.0);

  std::vector<std::optional<std::pair<std::size_t, double>>> cols(target.ncols);
  for (std::uint32_t c = 0; c < target.ncols; ++c) {
    cols[c] = locate(target.lon0 + c * target.dlon, sg.lon0, sg.dlon, sg.ncols);
  }
  for (std::uint32_t r = 0; r < target.nrows; ++r) {
    const auto row = locate(target.lat0 + r * target.dlat, sg.lat0, sg.dlat, sg.nrows);
    for (std::uint32_t c = 0; c < target.ncols; ++c) {
      auto& dst = out.values[std::size_t{r} * target.ncols + c];
      if (!row || !cols[c]) {
        ++out.out_of_extent;
        continue;
      }
      const auto [i, ty] = *row;
      const auto [j, tx] = *cols[c];
      const double v00 = src.at(i, j), v01 = src.at(i, j + 1);
      const double v10 = src.at(i + 1, j), v11 = src.at(i + 1, j + 1);
      const double v = (1.0 - ty) * ((1.0 - tx) * v00 + tx * v01) + ty * ((1.0 - tx) * v10 + tx * v11);
      // Rounding must not push a blend outside its corners.
      dst = std::clamp(v, std::min({v00, v01, v10, v11}), std::max({v00, v01, v10, v11}));
    }
  }
  return out;
}

Frame identity_or_resample(Frame frame, const GridGeometry& canonical) {
  if (frame.geometry == canonical) {
    frame.resampled = false;
    frame.out_of_extent = 0;
    return frame;
  }
  return bilinear_resample(frame, canonical);
}

}  // namespace smokearchive
