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

#include "smokearchive/indexer.h"

#include <algorithm>
#include <tuple>

#include <fmt/format.h>

#include "parallel.h"

namespace smokearchive {

namespace fs = std::filesystem;

std::string_view to_string(ScanStatus status) {
  switch (status) {
    case ScanStatus::ok: return "ok";
    case ScanStatus::not_a_granule: return "not_a_granule";
    case ScanStatus::truncated: return "truncated";
    case ScanStatus::invalid_header: return "invalid_header";
  }
  return "unknown";
}

std::string_view to_string(GeometryClass cls) {
  switch (cls) {
    case GeometryClass::canonical: return "canonical";
    case GeometryClass::drift: return "drift";
    case GeometryClass::other: return "other";
  }
  return "unknown";
}

namespace {

ScanStatus status_for(GranuleErrorKind kind) {
  switch (kind) {
    case GranuleErrorKind::not_a_granule: return ScanStatus::not_a_granule;
    case GranuleErrorKind::truncated: return ScanStatus::truncated;
    default: return ScanStatus::invalid_header;
  }
}

void scan_one(const fs::path& root, ScanRecord& rec, const ScanOptions& options) {
  const auto full = root / rec.path;
  std::error_code ec;
  rec.file_bytes = fs::file_size(full, ec);
  if (ec) {
    rec.status = ScanStatus::not_a_granule;
    rec.detail = fmt::format("cannot stat: {}", ec.message());
    return;
  }
  try {
    FileSource file(full);
    CountingSource counting(file);
    try {
      auto meta = read_header(counting);
      rec.bytes_read = counting.count();
      const auto expected = meta.expected_total_bytes();
      const auto dir = rec.path.begin() != rec.path.end() && std::next(rec.path.begin()) != rec.path.end()
                           ? rec.path.begin()->string()
                           : std::string();
      if (rec.file_bytes < expected) {
        rec.status = ScanStatus::truncated;
        rec.detail = fmt::format("file has {} of {} declared bytes", rec.file_bytes, expected);
      } else if (rec.file_bytes > expected) {
        rec.status = ScanStatus::invalid_header;
        rec.detail = fmt::format("{} bytes beyond declared payload", rec.file_bytes - expected);
      } else if (!dir.empty() && dir != meta.header.forecast_id) {
        rec.status = ScanStatus::invalid_header;
        rec.detail = fmt::format("header forecast id {} stored under {}", meta.header.forecast_id, dir);
      } else {
        rec.status = ScanStatus::ok;
      }
      rec.forecast_id = meta.header.forecast_id;
      const auto& geom = meta.header.geometry;
      if (options.canonical && geom == *options.canonical) {
        rec.geometry_class = GeometryClass::canonical;
      } else if (options.drift && geom == *options.drift) {
        rec.geometry_class = GeometryClass::drift;
      }
      if (rec.status == ScanStatus::ok) rec.metadata = std::move(meta);
    } catch (const GranuleError& e) {
      rec.bytes_read = counting.count();
      rec.status = status_for(e.kind());
      rec.detail = e.what();
    }
  } catch (const IoError& e) {
    rec.status = ScanStatus::not_a_granule;
    rec.detail = e.what();
  }
}

}  // namespace

std::vector<ScanRecord> scan_cache(const fs::path& root, const ScanOptions& options) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw IoError("indexer", fmt::format("cache root {} is not a readable directory", root.string()));
  }
  std::vector<ScanRecord> records;
  fs::recursive_directory_iterator it(root, ec), end;
  if (ec) throw IoError("indexer", fmt::format("cannot list {}: {}", root.string(), ec.message()));
  for (; it != end; it.increment(ec)) {
    if (ec) throw IoError("indexer", fmt::format("cannot list {}: {}", root.string(), ec.message()));
    if (it.depth() == 0 && it->is_directory() && it->path().filename() == "rejects") {
      it.disable_recursion_pending();
      continue;
    }
    if (!it->is_regular_file() || it->path().extension() != ".gran") continue;
    // Skip in-flight temporary files from an atomic commit.
    if (it->path().filename().string().starts_with(".")) continue;
    ScanRecord rec;
    rec.path = it->path().lexically_relative(root);
    const auto first = rec.path.begin();
    if (std::next(first) != rec.path.end()) rec.forecast_id = first->string();
    records.push_back(std::move(rec));
  }
  std::sort(records.begin(), records.end(),
            [](const ScanRecord& a, const ScanRecord& b) { return a.path.generic_string() < b.path.generic_string(); });
  detail::parallel_for(records.size(), options.workers, [&](std::size_t i) { scan_one(root, records[i], options); });
  return records;
}

std::size_t ConsistencyReport::flagged_groups() const {
  return static_cast<std::size_t>(std::count_if(groups.begin(), groups.end(), [](auto& g) { return g.flagged; }));
}

ConsistencyReport consistency_report(const std::vector<ScanRecord>& records,
                                     const std::optional<GridGeometry>& canonical) {
  ConsistencyReport report;
  for (const auto& rec : records) {
    ++report.status_counts[rec.status];
    if (!rec.metadata) continue;
    const auto& geom = rec.metadata->header.geometry;
    const auto created = julian_to_calendar(rec.metadata->header.creation);
    auto group = std::find_if(report.groups.begin(), report.groups.end(),
                              [&](const GeometryGroup& g) { return g.geometry == geom; });
    if (group == report.groups.end()) {
      GeometryGroup g;
      g.geometry = geom;
      g.geometry_class = rec.geometry_class;
      g.first_created = g.last_created = created;
      g.flagged = canonical.has_value() && !(geom == *canonical);
      report.groups.push_back(g);
      group = std::prev(report.groups.end());
    }
    ++group->files;
    group->first_created = std::min(group->first_created, created);
    group->last_created = std::max(group->last_created, created);
  }
  std::sort(report.groups.begin(), report.groups.end(),
            [](const GeometryGroup& a, const GeometryGroup& b) { return a.first_created < b.first_created; });
  return report;
}

std::string format_report(const ConsistencyReport& report) {
  std::string out;
  out += "file status:\n";
  for (const auto& [status, n] : report.status_counts) out += fmt::format("  {:<15} {}\n", to_string(status), n);
  out += fmt::format("geometries: {} ({} flagged)\n", report.groups.size(), report.flagged_groups());
  for (const auto& g : report.groups) {
    out += fmt::format("  {}{} [{}]: {} files, created {} .. {}\n", g.flagged ? "! " : "  ", describe(g.geometry),
                       to_string(g.geometry_class), g.files, format_iso(g.first_created), format_iso(g.last_created));
  }
  return out;
}

nlohmann::json to_json(const ConsistencyReport& report) {
  nlohmann::json j;
  for (const auto& [status, n] : report.status_counts) j["status_counts"][std::string(to_string(status))] = n;
  j["groups"] = nlohmann::json::array();
  for (const auto& g : report.groups) {
    j["groups"].push_back({{"nrows", g.geometry.nrows},
                           {"ncols", g.geometry.ncols},
                           {"lat0", g.geometry.lat0},
                           {"lon0", g.geometry.lon0},
                           {"dlat", g.geometry.dlat},
                           {"dlon", g.geometry.dlon},
                           {"class", to_string(g.geometry_class)},
                           {"files", g.files},
                           {"first_created", format_iso(g.first_created)},
                           {"last_created", format_iso(g.last_created)},
                           {"flagged", g.flagged}});
  }
  return j;
}

bool more_recent(const CandidateFrame& a, const CandidateFrame& b) {
  const auto pa = a.path.generic_string(), pb = b.path.generic_string();
  return std::tie(a.smoke_init, a.created, a.forecast_id, pa, a.frame_index) >
         std::tie(b.smoke_init, b.created, b.forecast_id, pb, b.frame_index);
}

std::span<const CandidateFrame> CoverageIndex::candidates(HourStep t) const {
  const auto it = entries_.find(t);
  if (it == entries_.end()) return {};
  return it->second;
}

nlohmann::json CoverageIndex::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [t, list] : entries_) {
    auto& arr = j[format_iso(t)];
    arr = nlohmann::json::array();
    for (const auto& c : list) {
      arr.push_back({{"path", c.path.generic_string()},
                     {"forecast_id", c.forecast_id},
                     {"frame_index", c.frame_index},
                     {"smoke_init", format_iso(c.smoke_init)},
                     {"created", format_iso(c.created)}});
    }
  }
  return j;
}

CoverageIndex build_coverage(const std::vector<ScanRecord>& records) {
  CoverageIndex index;
  for (const auto& rec : records) {
    if (rec.status != ScanStatus::ok || !rec.metadata) continue;
    const auto& h = rec.metadata->header;
    const auto smoke_init = julian_to_calendar(h.smoke_init);
    const auto created = julian_to_calendar(h.creation);
    for (std::uint32_t i = 0; i < rec.metadata->tflag.size(); ++i) {
      const auto t = HourStep::from_instant(julian_to_calendar(rec.metadata->tflag[i]));
      index.entries_[t].push_back({rec.path, h.forecast_id, i, smoke_init, created, h.geometry});
    }
  }
  for (auto& [t, list] : index.entries_) std::sort(list.begin(), list.end(), more_recent);
  return index;
}

}  // namespace smokearchive
