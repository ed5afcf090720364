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

#include "smokearchive/archive.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include <fmt/format.h>

#include "smokearchive/csv.h"
#include "smokearchive/fsutil.h"

namespace smokearchive {

namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little, "chunk files are raw little-endian f32");

namespace {

constexpr int kMaxLevels = 16;
constexpr std::string_view kProvenanceHeader =
    "tflag_date,tflag_time,cdate,ctime,wdate,wtime,sdate,stime,forecast_id,resampled,wrf_arw_init_time";

std::span<const std::byte> float_bytes(const std::vector<float>& v) { return std::as_bytes(std::span(v)); }

std::string provenance_line(const ProvenanceRow& p) {
  return fmt::format("{},{:06},{},{:06},{},{:06},{},{:06},{},{},{}\n", p.tflag.date, p.tflag.time, p.creation.date,
                     p.creation.time, p.weather_init.date, p.weather_init.time, p.smoke_init.date, p.smoke_init.time,
                     p.forecast_id, p.resampled ? 1 : 0, p.wrf_arw_init_time);
}

std::uint32_t parse_u32(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  unsigned long v = 0;
  try {
    v = std::stoul(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw ArchiveError(fmt::format("bad {} '{}'", what, text));
  return static_cast<std::uint32_t>(v);
}

double parse_f64(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw ArchiveError(fmt::format("bad {} '{}'", what, text));
  return v;
}

nlohmann::json geometry_json(const GridGeometry& g) {
  return {{"nrows", g.nrows}, {"ncols", g.ncols}, {"lat0", g.lat0},
          {"lon0", g.lon0},   {"dlat", g.dlat},   {"dlon", g.dlon}};
}

GridGeometry geometry_from_json(const nlohmann::json& j) {
  GridGeometry g;
  g.nrows = j.at("nrows").get<std::uint32_t>();
  g.ncols = j.at("ncols").get<std::uint32_t>();
  g.lat0 = j.at("lat0").get<double>();
  g.lon0 = j.at("lon0").get<double>();
  g.dlat = j.at("dlat").get<double>();
  g.dlon = j.at("dlon").get<double>();
  return g;
}

/// Index range [lo, hi] of grid points whose coordinate lies in [a, b].
std::optional<std::pair<std::uint32_t, std::uint32_t>> axis_window(double a, double b, double origin, double step,
                                                                   std::uint32_t n) {
  constexpr double kSlack = 1e-9;
  const double lo = std::ceil((a - origin) / step - kSlack);
  const double hi = std::floor((b - origin) / step + kSlack);
  const double first = std::max(lo, 0.0);
  const double last = std::min(hi, static_cast<double>(n) - 1.0);
  if (first > last) return std::nullopt;
  return std::pair{static_cast<std::uint32_t>(first), static_cast<std::uint32_t>(last)};
}

}  // namespace

fs::path chunk_path(const fs::path& archive_dir, int level, std::size_t index) {
  return archive_dir / fmt::format("L{}", level) / fmt::format("{:08}.bin", index);
}

nlohmann::json ArchiveManifest::to_json() const {
  nlohmann::json j;
  j["format_version"] = format_version;
  j["geometry"] = geometry_json(geometry);
  j["start"] = format_iso(start);
  j["end"] = format_iso(end);
  j["levels"] = levels;
  auto g = nlohmann::json::array();
  for (const auto t : gaps) g.push_back(format_iso(t));
  j["gaps"] = std::move(g);
  j["tool_version"] = tool_version;
  j["frames"] = frames;
  j["originals"] = originals;
  return j;
}

ArchiveManifest ArchiveManifest::from_json(const nlohmann::json& j) {
  ArchiveManifest m;
  try {
    m.format_version = j.at("format_version").get<int>();
    if (m.format_version != kArchiveFormatVersion) {
      throw ArchiveError(fmt::format("unsupported archive format version {}", m.format_version));
    }
    m.geometry = geometry_from_json(j.at("geometry"));
    m.start = parse_hour(j.at("start").get<std::string>());
    m.end = parse_hour(j.at("end").get<std::string>());
    m.levels = j.at("levels").get<int>();
    for (const auto& g : j.at("gaps")) m.gaps.push_back(parse_hour(g.get<std::string>()));
    m.tool_version = j.at("tool_version").get<std::string>();
    m.frames = j.at("frames").get<std::size_t>();
    m.originals = j.at("originals").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw ArchiveError(fmt::format("malformed manifest: {}", e.what()));
  }
  m.geometry.validate();
  if (m.levels < 1 || m.levels > kMaxLevels) throw ArchiveError(fmt::format("bad level count {}", m.levels));
  if (m.start > m.end) throw ArchiveError("manifest start after end");
  return m;
}

std::vector<float> pyramid_reduce(std::span<const float> values, std::uint32_t nrows, std::uint32_t ncols) {
  if (values.size() != std::size_t{nrows} * ncols) {
    throw GeometryError(fmt::format("pyramid input has {} values for {}x{}", values.size(), nrows, ncols));
  }
  const std::uint32_t out_rows = (nrows + 1) / 2;
  const std::uint32_t out_cols = (ncols + 1) / 2;
  std::vector<float> out(std::size_t{out_rows} * out_cols);
  for (std::uint32_t r = 0; r < out_rows; ++r) {
    const std::uint32_t r1 = std::min(2 * r + 2, nrows);
    for (std::uint32_t c = 0; c < out_cols; ++c) {
      const std::uint32_t c1 = std::min(2 * c + 2, ncols);
      double sum = 0.0;
      int n = 0;
      for (std::uint32_t i = 2 * r; i < r1; ++i) {
        for (std::uint32_t k = 2 * c; k < c1; ++k) {
          sum += values[std::size_t{i} * ncols + k];
          ++n;
        }
      }
      out[std::size_t{r} * out_cols + c] = static_cast<float>(sum / n);
    }
  }
  return out;
}

GridGeometry level_geometry(const GridGeometry& base, int level) {
  if (level < 0 || level >= kMaxLevels) throw RangeError("archive", fmt::format("no pyramid level {}", level));
  GridGeometry g = base;
  for (int l = 0; l < level; ++l) {
    g.nrows = (g.nrows + 1) / 2;
    g.ncols = (g.ncols + 1) / 2;
  }
  const double scale = std::ldexp(1.0, level);
  g.dlat = base.dlat * scale;
  g.dlon = base.dlon * scale;
  g.lat0 = base.lat0 + (scale - 1.0) / 2.0 * base.dlat;
  g.lon0 = base.lon0 + (scale - 1.0) / 2.0 * base.dlon;
  return g;
}

ArchiveManifest build_archive(const SequencePlan& plan, const fs::path& cache_root, const GridGeometry& canonical,
                              const fs::path& out_arg, const BuildOptions& options) {
  const fs::path out = out_arg.has_filename() ? out_arg : out_arg.parent_path();
  canonical.validate();
  if (options.levels < 1 || options.levels > kMaxLevels) {
    throw ConfigError("archive", fmt::format("levels must be in 1..{}, got {}", kMaxLevels, options.levels));
  }
  if (plan.start > plan.end) throw RangeError("archive", "plan start after end");
  std::error_code ec;
  if (fs::exists(out) && !(fs::is_directory(out) && fs::is_empty(out))) {
    throw IoError("archive", fmt::format("{} already exists and is not empty", out.string()));
  }

  const fs::path stage = out.parent_path() / (out.filename().string() + ".partial");
  fs::remove_all(stage, ec);
  fs::create_directories(stage, ec);
  if (ec) throw IoError("archive", fmt::format("cannot create {}: {}", stage.string(), ec.message()));
  struct StageGuard {
    const fs::path& dir;
    bool committed = false;
    ~StageGuard() {
      std::error_code ignored;
      if (!committed) fs::remove_all(dir, ignored);
    }
  } guard{stage};

  ArchiveManifest manifest;
  manifest.geometry = canonical;
  manifest.start = plan.start;
  manifest.end = plan.end;
  manifest.levels = options.levels;
  manifest.gaps = plan.gaps;

  std::string provenance(kProvenanceHeader);
  provenance += '\n';
  std::string originals_index = "index,nrows,ncols,lat0,lon0,dlat,dlon\n";

  fs::path loaded_path;
  ForecastGranule granule;
  for (const auto& [t, pick] : plan.picks) {
    if (!plan.in_range(t)) {
      throw ArchiveError(fmt::format("pick {} outside plan range", format_iso(t)));
    }
    const auto index = static_cast<std::size_t>((t - plan.start).count());
    const fs::path source = cache_root / pick.path;
    try {
      if (source != loaded_path) {
        loaded_path.clear();
        granule = parse_granule_file(source);
        loaded_path = source;
      }
      if (pick.frame_index >= granule.header.ntimes) {
        throw ArchiveError(fmt::format("frame {} beyond {} frames", pick.frame_index, granule.header.ntimes));
      }
      if (granule.tflag[pick.frame_index] != calendar_to_julian(t.instant())) {
        throw ArchiveError(fmt::format("frame {} is not stamped {}", pick.frame_index, format_iso(t)));
      }
      if (granule.header.forecast_id != pick.forecast_id) {
        throw ArchiveError(fmt::format("granule id {} does not match planned {}", granule.header.forecast_id,
                                       pick.forecast_id));
      }
    } catch (const Error& e) {
      throw ArchiveError(fmt::format("{} at {}: {}", source.string(), format_iso(t), e.what()));
    }

    const auto& h = granule.header;
    const auto raw = granule.frame(pick.frame_index);
    Frame frame = identity_or_resample(Frame::from_floats(h.geometry, raw), canonical);

    std::vector<float> level(frame.values.begin(), frame.values.end());
    GridGeometry lg = canonical;
    atomic_write(chunk_path(stage, 0, index), float_bytes(level));
    for (int l = 1; l < options.levels; ++l) {
      level = pyramid_reduce(level, lg.nrows, lg.ncols);
      lg.nrows = (lg.nrows + 1) / 2;
      lg.ncols = (lg.ncols + 1) / 2;
      atomic_write(chunk_path(stage, l, index), float_bytes(level));
    }

    if (frame.resampled && options.keep_originals) {
      std::vector<float> original(raw.begin(), raw.end());
      atomic_write(stage / "originals" / fmt::format("{:08}.bin", index), float_bytes(original));
      const auto& g = h.geometry;
      originals_index += fmt::format("{},{},{},{},{},{},{}\n", index, g.nrows, g.ncols, g.lat0, g.lon0, g.dlat, g.dlon);
      manifest.originals = true;
    }

    ProvenanceRow row;
    row.tflag = granule.tflag[pick.frame_index];
    row.creation = h.creation;
    row.weather_init = h.weather_init;
    row.smoke_init = h.smoke_init;
    row.forecast_id = h.forecast_id;
    row.resampled = frame.resampled;
    row.wrf_arw_init_time = format_iso(julian_to_calendar(h.weather_init));
    provenance += provenance_line(row);
    ++manifest.frames;
  }

  atomic_write_text(stage / "provenance.csv", provenance);
  if (manifest.originals) atomic_write_text(stage / "originals" / "index.csv", originals_index);
  // The manifest marks the archive complete, so it goes last.
  atomic_write_text(stage / "manifest.json", manifest.to_json().dump(2) + "\n");

  if (fs::exists(out)) fs::remove(out, ec);
  fs::rename(stage, out, ec);
  if (ec) throw IoError("archive", fmt::format("cannot move {} into place: {}", out.string(), ec.message()));
  guard.committed = true;
  return manifest;
}

Archive Archive::open(const fs::path& dir) {
  Archive a;
  a.dir_ = dir;
  const auto manifest_path = dir / "manifest.json";
  if (!fs::exists(manifest_path)) {
    throw ArchiveError(fmt::format("{} is not a finalized archive (no manifest.json)", dir.string()));
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(manifest_path));
  } catch (const nlohmann::json::exception& e) {
    throw ArchiveError(fmt::format("{}: {}", manifest_path.string(), e.what()));
  }
  a.manifest_ = ArchiveManifest::from_json(j);

  const auto table = read_csv(dir / "provenance.csv");
  require_header(table, split_csv_line(kProvenanceHeader), (dir / "provenance.csv").string());
  for (const auto& r : table.rows) {
    ProvenanceRow p;
    p.tflag = {parse_u32(r[0], "tflag_date"), parse_u32(r[1], "tflag_time")};
    p.creation = {parse_u32(r[2], "cdate"), parse_u32(r[3], "ctime")};
    p.weather_init = {parse_u32(r[4], "wdate"), parse_u32(r[5], "wtime")};
    p.smoke_init = {parse_u32(r[6], "sdate"), parse_u32(r[7], "stime")};
    p.forecast_id = r[8];
    p.resampled = r[9] == "1";
    p.wrf_arw_init_time = r[10];
    const auto t = HourStep::from_instant(julian_to_calendar(p.tflag));
    if (!a.in_range(t)) throw ArchiveError(fmt::format("provenance row {} outside archive range", format_iso(t)));
    a.provenance_.emplace(t, std::move(p));
  }
  if (a.provenance_.size() != a.manifest_.frames) {
    throw ArchiveError(fmt::format("provenance lists {} frames, manifest {}", a.provenance_.size(),
                                   a.manifest_.frames));
  }

  const auto originals = dir / "originals" / "index.csv";
  if (fs::exists(originals)) {
    const auto idx = read_csv(originals);
    require_header(idx, {"index", "nrows", "ncols", "lat0", "lon0", "dlat", "dlon"}, originals.string());
    for (const auto& r : idx.rows) {
      GridGeometry g;
      g.nrows = parse_u32(r[1], "nrows");
      g.ncols = parse_u32(r[2], "ncols");
      g.lat0 = parse_f64(r[3], "lat0");
      g.lon0 = parse_f64(r[4], "lon0");
      g.dlat = parse_f64(r[5], "dlat");
      g.dlon = parse_f64(r[6], "dlon");
      a.original_geometries_.emplace(parse_u32(r[0], "index"), g);
    }
  }
  return a;
}

std::vector<float> Archive::read_chunk(const fs::path& path, std::size_t cells) const {
  std::vector<float> values(cells);
  auto bytes = std::as_writable_bytes(std::span(values));
  FileSource file(path);
  CountingSource counted(file);
  std::size_t got = 0;
  while (got < bytes.size()) {
    const auto n = counted.read(bytes.subspan(got));
    if (n == 0) break;
    got += n;
  }
  std::byte extra;
  const bool trailing = counted.read(std::span(&extra, 1)) != 0;
  bytes_read_->fetch_add(counted.count());
  if (got != bytes.size() || trailing) {
    throw ArchiveError(fmt::format("{}: chunk size does not match {} cells", path.string(), cells));
  }
  return values;
}

GapInfo Archive::gap_info(HourStep t) const {
  GapInfo g{t, std::nullopt, std::nullopt};
  auto it = provenance_.lower_bound(t);
  if (it != provenance_.end()) g.next_covered = it->first;
  if (it != provenance_.begin()) g.previous_covered = std::prev(it)->first;
  return g;
}

FrameRead Archive::read_frame(HourStep t, int level) const {
  if (!in_range(t)) {
    throw RangeError("archive", fmt::format("{} outside archive range {} .. {}", format_iso(t),
                                            format_iso(manifest_.start), format_iso(manifest_.end)));
  }
  if (level < 0 || level >= manifest_.levels) {
    throw RangeError("archive", fmt::format("level {} not built (archive has {})", level, manifest_.levels));
  }
  FrameRead out;
  const auto p = provenance_.find(t);
  if (p == provenance_.end()) {
    out.gap = gap_info(t);
    return out;
  }
  const auto g = geometry(level);
  out.frame = Frame::from_floats(g, read_chunk(chunk_path(dir_, level, chunk_index(t)), g.cells()));
  out.frame.resampled = p->second.resampled;
  out.provenance = p->second;
  return out;
}

WindowRead Archive::read_window(HourStep t0, HourStep t1, const BoundingBox& bbox, int level) const {
  if (t0 > t1) throw RangeError("archive", "window start after end");
  if (!in_range(t0) || !in_range(t1)) {
    throw RangeError("archive", fmt::format("window {} .. {} outside archive range {} .. {}", format_iso(t0),
                                            format_iso(t1), format_iso(manifest_.start), format_iso(manifest_.end)));
  }
  if (level < 0 || level >= manifest_.levels) {
    throw RangeError("archive", fmt::format("level {} not built (archive has {})", level, manifest_.levels));
  }
  const auto g = geometry(level);
  const auto rows = axis_window(bbox.lat_min, bbox.lat_max, g.lat0, g.dlat, g.nrows);
  const auto cols = axis_window(bbox.lon_min, bbox.lon_max, g.lon0, g.dlon, g.ncols);
  if (!rows || !cols) throw RangeError("archive", "bounding box contains no grid point");

  WindowRead w;
  w.row0 = rows->first;
  w.col0 = cols->first;
  w.nrows = rows->second - rows->first + 1;
  w.ncols = cols->second - cols->first + 1;
  for (std::uint32_t r = 0; r < w.nrows; ++r) w.lats.push_back(g.lat0 + (w.row0 + r) * g.dlat);
  for (std::uint32_t c = 0; c < w.ncols; ++c) w.lons.push_back(g.lon0 + (w.col0 + c) * g.dlon);

  for (const auto t : hour_range(t0, t1)) {
    if (!covered(t)) {
      w.gaps.push_back(t);
      continue;
    }
    const auto chunk = read_chunk(chunk_path(dir_, level, chunk_index(t)), g.cells());
    w.times.push_back(t);
    for (std::uint32_t r = 0; r < w.nrows; ++r) {
      const auto begin = chunk.begin() + static_cast<std::ptrdiff_t>(std::size_t{w.row0 + r} * g.ncols + w.col0);
      w.values.insert(w.values.end(), begin, begin + w.ncols);
    }
  }
  return w;
}

std::optional<Frame> Archive::read_original(HourStep t) const {
  if (!in_range(t)) return std::nullopt;
  const auto index = chunk_index(t);
  const auto g = original_geometries_.find(index);
  if (g == original_geometries_.end()) return std::nullopt;
  auto values = read_chunk(dir_ / "originals" / fmt::format("{:08}.bin", index), g->second.cells());
  return Frame::from_floats(g->second, values);
}

}  // namespace smokearchive
