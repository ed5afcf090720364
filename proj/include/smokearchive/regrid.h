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

#include <cstddef>
#include <span>
#include <vector>

#include "smokearchive/granule.h"

namespace smokearchive {

/// One gridded PM2.5 field (ug/m^3), row-major with row = latitude index.
struct Frame {
  GridGeometry geometry;
  std::vector<double> values;
  bool resampled = false;
  /// Target cells that fell outside the source extent and were set to 0.
  std::size_t out_of_extent = 0;

  double at(std::size_t row, std::size_t col) const { return values[row * geometry.ncols + col]; }

  static Frame from_floats(const GridGeometry& geometry, std::span<const float> values);
};

/// Bilinear blend of the four source points around each target point.
/// Throws GeometryError when the source is narrower than 2 x 2 or its value
/// count does not match its geometry.
Frame bilinear_resample(const Frame& src, const GridGeometry& target);

/// Returns `frame` untouched (resampled = false) when its geometry equals
/// `canonical` exactly, else resamples onto `canonical`.
Frame identity_or_resample(Frame frame, const GridGeometry& canonical);

}  // namespace smokearchive
