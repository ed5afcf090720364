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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "smokearchive/granule.h"
#include "smokearchive/timecal.h"

namespace smokearchive {

enum class ScanStatus { ok, not_a_granule, truncated, invalid_header };
enum class GeometryClass { canonical, drift, other };

std::string_view to_string(ScanStatus status);
std::string_view to_string(GeometryClass cls);

struct ScanRecord {
  std::filesystem::path path;  // relative to the scanned root
  std::string forecast_id;
  ScanStatus status = ScanStatus::ok;
  std::string detail;
  std::optional<HeaderRead> metadata;  // present iff status == ok
  GeometryClass geometry_class = GeometryClass::other;
  std::uint64_t file_bytes = 0;
  /// Bytes pulled from the file while scanning it.
  std::uint64_t bytes_read = 0;
};

struct ScanOptions {
  std::optional<GridGeometry> canonical;
  std::optional<GridGeometry> drift;
  int workers = 1;
};

/// One record per *.gran file under `root` (the rejects/ subtree excluded),
/// sorted by path. Reads headers and TFLAGs only; payload length is checked
/// against the file size. Throws IoError if `root` cannot be listed.
std::vector<ScanRecord> scan_cache(const std::filesystem::path& root, const ScanOptions& options = {});

struct GeometryGroup {
  GridGeometry geometry;
  GeometryClass geometry_class = GeometryClass::other;
  std::size_t files = 0;
  Instant first_created{};
  Instant last_created{};
  bool flagged = false;  // differs from the canonical geometry
};

struct ConsistencyReport {
  std::vector<GeometryGroup> groups;  // ordered by first creation
  std::map<ScanStatus, std::size_t> status_counts;
  std::size_t flagged_groups() const;
};

ConsistencyReport consistency_report(const std::vector<ScanRecord>& records,
                                     const std::optional<GridGeometry>& canonical);
std::string format_report(const ConsistencyReport& report);
nlohmann::json to_json(const ConsistencyReport& report);

struct CandidateFrame {
  std::filesystem::path path;
  std::string forecast_id;
  std::uint32_t frame_index = 0;
  Instant smoke_init{};
  Instant created{};
  GridGeometry geometry;

  friend bool operator==(const CandidateFrame&, const CandidateFrame&) = default;
};

/// Recency order: (smoke_init, created, forecast_id), then path and frame
/// for a total order.
bool more_recent(const CandidateFrame& a, const CandidateFrame& b);

/// Hourly timestep -> candidate frames, each list newest first.
class CoverageIndex {
 public:
  using Map = std::map<HourStep, std::vector<CandidateFrame>>;

  const Map& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  /// Empty span when `t` is not covered.
  std::span<const CandidateFrame> candidates(HourStep t) const;
  HourStep first() const { return entries_.begin()->first; }
  HourStep last() const { return entries_.rbegin()->first; }

  nlohmann::json to_json() const;

 private:
  friend CoverageIndex build_coverage(const std::vector<ScanRecord>& records);
  Map entries_;
};

CoverageIndex build_coverage(const std::vector<ScanRecord>& records);

}  // namespace smokearchive
