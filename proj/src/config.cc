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

#include "smokearchive/config.h"

#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "smokearchive/corpusgen.h"
#include "smokearchive/fsutil.h"

namespace smokearchive {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_int(std::string_view key, std::string_view text) {
  T v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw UsageError(fmt::format("{}: '{}' is not an integer", key, text));
  }
  return v;
}

double parse_double(std::string_view key, std::string_view text) {
  const std::string s(text);
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v)) {
    throw UsageError(fmt::format("{}: '{}' is not a number", key, text));
  }
  return v;
}

Date parse_date_arg(std::string_view key, std::string_view text) {
  try {
    return parse_date(text);
  } catch (const Error& e) {
    throw UsageError(fmt::format("{}: {}", key, e.what()));
  }
}

}  // namespace

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  while (true) {
    const auto comma = text.find(',');
    const auto item = trim(text.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

GridGeometry parse_geometry(std::string_view text) {
  text = trim(text);
  if (text == "desk") return desk_geometry();
  if (text == "desk-drift") return desk_drift_geometry();
  if (text == "full") return full_geometry();
  if (text == "full-drift") return full_drift_geometry();
  const auto parts = split_list(text);
  if (parts.size() != 6) {
    throw UsageError(fmt::format("geometry '{}': expected a preset or nrows,ncols,lat0,lon0,dlat,dlon", text));
  }
  GridGeometry g;
  g.nrows = parse_int<std::uint32_t>("geometry", parts[0]);
  g.ncols = parse_int<std::uint32_t>("geometry", parts[1]);
  g.lat0 = parse_double("geometry", parts[2]);
  g.lon0 = parse_double("geometry", parts[3]);
  g.dlat = parse_double("geometry", parts[4]);
  g.dlon = parse_double("geometry", parts[5]);
  try {
    g.validate();
  } catch (const GeometryError& e) {
    throw UsageError(fmt::format("geometry '{}': {}", text, e.what()));
  }
  return g;
}

PipelineConfig::PipelineConfig() : forecast_ids(default_forecast_ids()), canonical(desk_geometry()) {}

void PipelineConfig::set(std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "endpoint") {
    endpoint = value;
  } else if (key == "forecast_ids") {
    forecast_ids = split_list(value);
  } else if (key == "start") {
    start_date = parse_date_arg(key, value);
  } else if (key == "end") {
    end_date = parse_date_arg(key, value);
  } else if (key == "geometry") {
    canonical = parse_geometry(value);
  } else if (key == "drift_geometry") {
    drift = parse_geometry(value);
  } else if (key == "corpus") {
    corpus = value;
  } else if (key == "cache") {
    cache = value;
  } else if (key == "archive") {
    archive = value;
  } else if (key == "plan_dir") {
    plan_dir = value;
  } else if (key == "levels") {
    levels = parse_int<int>(key, value);
  } else if (key == "mode") {
    try {
      mode = parse_sampling_mode(value);
    } catch (const ConfigError& e) {
      throw UsageError(e.what());
    }
  } else if (key == "cloud_max") {
    analysis.cloud_max_pct = parse_double(key, value);
  } else if (key == "clear_sky_threshold") {
    analysis.clear_sky_threshold = parse_double(key, value);
  } else if (key == "utc_offset") {
    analysis.utc_offset_hours = parse_double(key, value);
  } else if (key == "pairing_days") {
    analysis.pairing_days = parse_int<int>(key, value);
  } else if (key == "parallel") {
    parallel = parse_int<int>(key, value);
  } else if (key == "workers") {
    workers = parse_int<int>(key, value);
  } else if (key == "seed") {
    seed = parse_int<std::uint64_t>(key, value);
  } else {
    throw UsageError(fmt::format("unknown config key '{}'", key));
  }
}

void PipelineConfig::apply_text(std::string_view text, std::string_view source_name) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError(fmt::format("{}:{}: expected key = value", source_name, line_no));
    }
    try {
      set(trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const UsageError& e) {
      throw UsageError(fmt::format("{}:{}: {}", source_name, line_no, e.what()));
    }
  }
}

void PipelineConfig::load(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const IoError& e) {
    throw UsageError(e.what());
  }
  apply_text(text, path.string());
}

void PipelineConfig::validate() const {
  try {
    canonical.validate();
    if (drift) drift->validate();
  } catch (const GeometryError& e) {
    throw UsageError(e.what());
  }
  if (levels < 1) throw UsageError(fmt::format("levels must be >= 1, got {}", levels));
  if (parallel < 1 || workers < 1) throw UsageError("parallel and workers must be >= 1");
  const std::pair<std::string_view, const std::filesystem::path*> paths[] = {
      {"corpus", &corpus}, {"cache", &cache}, {"archive", &archive}, {"plan_dir", &plan_dir}};
  for (std::size_t i = 0; i < std::size(paths); ++i) {
    for (std::size_t j = i + 1; j < std::size(paths); ++j) {
      if (paths[i].second->empty() || paths[j].second->empty()) continue;
      if (std::filesystem::weakly_canonical(*paths[i].second) == std::filesystem::weakly_canonical(*paths[j].second)) {
        throw UsageError(fmt::format("{} and {} name the same path {}", paths[i].first, paths[j].first,
                                     paths[i].second->string()));
      }
    }
  }
}

}  // namespace smokearchive
