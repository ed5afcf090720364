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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "smokearchive/granule.h"
#include "smokearchive/pvanalysis.h"
#include "smokearchive/query.h"

namespace smokearchive {

/// Bad invocation: unknown flag, unknown config key, malformed value.
class UsageError : public Error {
 public:
  explicit UsageError(const std::string& message) : Error("cli", message) {}
};

/// "desk", "desk-drift", "full", "full-drift", or
/// "nrows,ncols,lat0,lon0,dlat,dlon". Throws UsageError.
GridGeometry parse_geometry(std::string_view text);

/// Settings shared by the subcommands. A config file holds flat
/// `key = value` lines; '#' starts a comment.
struct PipelineConfig {
  std::string endpoint;
  std::vector<std::string> forecast_ids;
  std::optional<Date> start_date;
  std::optional<Date> end_date;
  GridGeometry canonical;
  std::optional<GridGeometry> drift;
  std::filesystem::path corpus;
  std::filesystem::path cache;
  std::filesystem::path archive;
  std::filesystem::path plan_dir;
  int levels = 1;
  SamplingMode mode = SamplingMode::bilinear;
  AnalysisOptions analysis;
  int parallel = 8;
  int workers = 1;
  std::uint64_t seed = 0;

  PipelineConfig();

  /// Throws UsageError for an unknown key or a malformed value.
  void set(std::string_view key, std::string_view value);
  /// Applies every line of a config file.
  void apply_text(std::string_view text, std::string_view source_name);
  void load(const std::filesystem::path& path);
  /// Throws UsageError when two configured paths coincide or the geometry
  /// is invalid.
  void validate() const;
};

std::vector<std::string> split_list(std::string_view text);

}  // namespace smokearchive
