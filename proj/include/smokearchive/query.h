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

#include <filesystem>
#include <string_view>
#include <utility>
#include <vector>

#include "smokearchive/archive.h"

namespace smokearchive {

enum class SamplingMode { southwest_corner, bilinear };

std::string_view to_string(SamplingMode mode);
/// Accepts "sw", "southwest_corner" or "bilinear"; throws ConfigError.
SamplingMode parse_sampling_mode(std::string_view text);

/// Raised when sampling an hour the archive has no frame for.
class GapError : public Error {
 public:
  explicit GapError(const GapInfo& info);
  const GapInfo& info() const noexcept { return info_; }

 private:
  GapInfo info_;
};

class ExtentError : public Error {
 public:
  explicit ExtentError(const std::string& message) : Error("query", message) {}
};

/// Samples one frame at (lat, lon). Coordinates within 1e-9 cells of a grid
/// line are snapped onto it, so node coordinates reproduce stored values in
/// both modes. Throws ExtentError outside the grid.
double sample_frame(const Frame& frame, double lat, double lon, SamplingMode mode);

/// Level-0 sample. Throws GapError for a gap hour, ExtentError for a point
/// outside the grid, RangeError for an hour outside the archive and
/// ConfigError for level != 0.
double sample_point(const Archive& archive, HourStep t, double lat, double lon, SamplingMode mode, int level = 0);

struct Series {
  std::vector<std::pair<HourStep, double>> values;
  std::vector<HourStep> gaps;
};

/// One value per covered hour of [t0, t1]; gap hours are listed, not thrown.
Series sample_series(const Archive& archive, HourStep t0, HourStep t1, double lat, double lon, SamplingMode mode,
                     int level = 0);

/// timestep_utc,pm25_ugm3
void write_series_csv(const Series& series, const std::filesystem::path& path);
std::string series_csv(const Series& series);

}  // namespace smokearchive
