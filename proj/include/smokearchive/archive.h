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

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "smokearchive/regrid.h"
#include "smokearchive/sequencer.h"

namespace smokearchive {

inline constexpr int kArchiveFormatVersion = 1;
inline constexpr std::string_view kToolVersion = "smokearchive 0.1.0";

/// Provenance of one archived hour: the picked granule's stamps, verbatim.
struct ProvenanceRow {
  JulianStamp tflag;
  JulianStamp creation;
  JulianStamp weather_init;
  JulianStamp smoke_init;
  std::string forecast_id;
  bool resampled = false;
  /// ISO 8601 rendering of weather_init.
  std::string wrf_arw_init_time;

  friend bool operator==(const ProvenanceRow&, const ProvenanceRow&) = default;
};

struct ArchiveManifest {
  int format_version = kArchiveFormatVersion;
  GridGeometry geometry;
  HourStep start;
  HourStep end;
  int levels = 1;
  std::vector<HourStep> gaps;
  std::string tool_version{kToolVersion};
  std::size_t frames = 0;
  bool originals = false;

  nlohmann::json to_json() const;
  static ArchiveManifest from_json(const nlohmann::json& j);
};

class ArchiveError : public Error {
 public:
  explicit ArchiveError(const std::string& message) : Error("archive", message) {}
};

struct BuildOptions {
  int levels = 1;
  /// Keep pre-resample frames under originals/.
  bool keep_originals = true;
};

/// Materializes `plan` into `out`: L{level}/{index:08}.bin chunks,
/// provenance.csv, originals/ and finally manifest.json. The archive is
/// assembled in a staging directory and renamed into place, so `out` never
/// holds a partial archive. Throws ArchiveError naming the granule and
/// timestep when a picked frame cannot be read.
ArchiveManifest build_archive(const SequencePlan& plan, const std::filesystem::path& cache_root,
                              const GridGeometry& canonical, const std::filesystem::path& out,
                              const BuildOptions& options = {});

/// One pyramid step: 2x2 means, partial blocks on odd edges, accumulated in
/// double and stored as float.
std::vector<float> pyramid_reduce(std::span<const float> values, std::uint32_t nrows, std::uint32_t ncols);

/// Geometry of pyramid level `level` derived from level 0. Coarse cells sit
/// at the centroid of their full 2^L x 2^L block.
GridGeometry level_geometry(const GridGeometry& base, int level);

struct GapInfo {
  HourStep t;
  std::optional<HourStep> previous_covered;
  std::optional<HourStep> next_covered;
};

struct FrameRead {
  /// Set when `t` is a gap; `frame` and `provenance` are then empty.
  std::optional<GapInfo> gap;
  Frame frame;
  ProvenanceRow provenance;
};

/// Inclusive lat/lon rectangle.
struct BoundingBox {
  double lat_min = -90.0;
  double lat_max = 90.0;
  double lon_min = -180.0;
  double lon_max = 180.0;
};

struct WindowRead {
  std::vector<HourStep> times;  // covered hours, ascending
  std::vector<HourStep> gaps;   // omitted hours, ascending
  std::uint32_t row0 = 0;
  std::uint32_t col0 = 0;
  std::uint32_t nrows = 0;
  std::uint32_t ncols = 0;
  std::vector<double> lats;
  std::vector<double> lons;
  std::vector<float> values;  // times x nrows x ncols

  float at(std::size_t ti, std::size_t r, std::size_t c) const { return values[(ti * nrows + r) * ncols + c]; }
};

/// Read-only view of a finalized archive. Opening loads the manifest and the
/// provenance table; frame reads touch exactly one chunk file each.
class Archive {
 public:
  /// Throws ArchiveError if the directory is not a finalized archive.
  static Archive open(const std::filesystem::path& dir);

  const ArchiveManifest& manifest() const { return manifest_; }
  const std::filesystem::path& dir() const { return dir_; }
  GridGeometry geometry(int level = 0) const { return level_geometry(manifest_.geometry, level); }

  bool in_range(HourStep t) const { return manifest_.start <= t && t <= manifest_.end; }
  bool covered(HourStep t) const { return provenance_.contains(t); }
  const std::map<HourStep, ProvenanceRow>& provenance() const { return provenance_; }

  /// Throws RangeError for t outside the archive or an absent level.
  FrameRead read_frame(HourStep t, int level = 0) const;

  /// Throws RangeError for a bad time range or level, and when the box
  /// contains no grid point of the level.
  WindowRead read_window(HourStep t0, HourStep t1, const BoundingBox& bbox, int level = 0) const;

  /// Pre-resample frame, if one was kept for `t`.
  std::optional<Frame> read_original(HourStep t) const;

  /// Chunk bytes read so far through this object (and its copies).
  std::uint64_t bytes_read() const { return bytes_read_->load(); }

 private:
  std::vector<float> read_chunk(const std::filesystem::path& path, std::size_t cells) const;
  GapInfo gap_info(HourStep t) const;
  std::size_t chunk_index(HourStep t) const { return static_cast<std::size_t>((t - manifest_.start).count()); }

  std::filesystem::path dir_;
  ArchiveManifest manifest_;
  std::map<HourStep, ProvenanceRow> provenance_;
  std::map<std::size_t, GridGeometry> original_geometries_;
  std::shared_ptr<std::atomic<std::uint64_t>> bytes_read_ = std::make_shared<std::atomic<std::uint64_t>>(0);
};

std::filesystem::path chunk_path(const std::filesystem::path& archive_dir, int level, std::size_t index);

}  // namespace smokearchive
