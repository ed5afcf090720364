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

#include "smokearchive/corpusgen.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include <fmt/format.h>

#include "parallel.h"
#include "rng.h"
#include "smokearchive/csv.h"
#include "smokearchive/fsutil.h"

namespace smokearchive {

namespace fs = std::filesystem;
using namespace std::chrono;

GridGeometry desk_geometry() { return {20, 40, 45.0, -125.0, 0.5, 0.5}; }
GridGeometry desk_drift_geometry() { return {20, 36, 45.0, -125.0, 0.5, 0.5}; }
GridGeometry full_geometry() { return {381, 1081, 32.0, -160.0, 0.1, 0.1}; }
GridGeometry full_drift_geometry() { return {381, 1041, 32.0, -160.0, 0.1, 0.1}; }

std::vector<std::string> default_forecast_ids() {
  return {"BSC00CA12-01", "BSC06CA12-01", "BSC12CA12-01", "BSC18CA12-01"};
}

std::optional<int> init_hour_of(std::string_view id) {
  if (id.size() < 5 || id.substr(0, 3) != "BSC") return std::nullopt;
  const char a = id[3], b = id[4];
  if (a < '0' || a > '9' || b < '0' || b > '9') return std::nullopt;
  const int hour = (a - '0') * 10 + (b - '0');
  if (hour > 23) return std::nullopt;
  return hour;
}

std::uint64_t mix_seed(std::uint64_t seed, std::string_view tag, std::int64_t value) {
  // FNV-1a over the tag, then splitmix64 finalization of the combination.
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 1099511628211ull;
  }
  auto splitmix = [](std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
  };
  return splitmix(splitmix(seed ^ h) ^ static_cast<std::uint64_t>(value));
}

// ---- smoke model -----------------------------------------------------------

double puff_value(const FireSource& s, Wind wind, double elapsed_hours, double lat, double lon,
                  const PlumeModel& model) {
  const double clat = s.lat + wind.v * elapsed_hours;
  const double clon = s.lon + wind.u * elapsed_hours;
  const double sigma = model.sigma0 + model.spread_rate * elapsed_hours;
  const double d2 = (lat - clat) * (lat - clat) + (lon - clon) * (lon - clon);
  return s.strength * std::exp(-d2 / (2.0 * sigma * sigma));
}

std::vector<double> puff_field(std::span<const FireSource> sources, Wind wind, HourStep t,
                               const GridGeometry& geom, const PlumeModel& model) {
  std::vector<double> out(geom.cells(), 0.0);
  for (const auto& s : sources) {
    if (s.strength < 0.0) throw RangeError("corpusgen", "negative emission strength");
    if (s.ignition > t.instant()) {
      throw RangeError("corpusgen", fmt::format("source ignites at {}, after {}", format_iso(s.ignition),
                                                format_iso(t)));
    }
    const double elapsed = duration<double, std::ratio<3600>>(t.instant() - s.ignition).count();
    for (std::uint32_t r = 0; r < geom.nrows; ++r) {
      const double lat = geom.lat0 + r * geom.dlat;
      for (std::uint32_t c = 0; c < geom.ncols; ++c) {
        out[std::size_t{r} * geom.ncols + c] += puff_value(s, wind, elapsed, lat, geom.lon0 + c * geom.dlon, model);
      }
    }
  }
  return out;
}

TruthModel::TruthModel(const CorpusSpec& spec)
    : lifetime_hours_(spec.fire_lifetime_hours), background_(spec.background_pm25), plume_(spec.plume) {
  detail::Rng rng(mix_seed(spec.seed, "truth", 0));
  wind_ = spec.wind.value_or(Wind{rng.uniform(-0.15, 0.15), rng.uniform(-0.1, 0.1)});
  if (spec.fires) {
    fires_ = *spec.fires;
    return;
  }
  // Fires igniting from two days before the corpus start until its last
  // forecast hour, spread over the canonical domain.
  const auto first = Instant{spec.start_date} - hours{48};
  const auto last = Instant{spec.end_date} + hours{24 + spec.horizon_hours};
  const double span_h = duration<double, std::ratio<3600>>(last - first).count();
  const auto count = static_cast<std::size_t>(std::lround(spec.fires_per_day * span_h / 24.0));
  const auto& g = spec.geometry;
  for (std::size_t i = 0; i < count; ++i) {
    FireSource f;
    f.lat = rng.uniform(g.lat0, g.lat_max());
    f.lon = rng.uniform(g.lon0, g.lon_max());
    f.strength = rng.uniform(20.0, 150.0);
    f.ignition = first + seconds{static_cast<std::int64_t>(rng.uniform() * span_h) * 3600};
    fires_.push_back(f);
  }
}

std::vector<FireSource> TruthModel::active(Instant t) const {
  std::vector<FireSource> out;
  for (const auto& f : fires_) {
    if (f.ignition <= t && t - f.ignition < duration<double, std::ratio<3600>>(lifetime_hours_)) out.push_back(f);
  }
  return out;
}

double TruthModel::at(Instant t, double lat, double lon) const {
  double v = background_;
  for (const auto& f : active(t)) {
    v += puff_value(f, wind_, duration<double, std::ratio<3600>>(t - f.ignition).count(), lat, lon, plume_);
  }
  return v;
}

std::vector<double> TruthModel::field(HourStep t, const GridGeometry& geom) const {
  const auto fires = active(t.instant());
  auto out = puff_field(fires, wind_, t, geom, plume_);
  for (auto& v : out) v += background_;
  return out;
}

// ---- spec ------------------------------------------------------------------

void FaultProfile::validate() const {
  for (double r : {missing_run_rate, html_rate, truncation_rate}) {
    if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("corpusgen", fmt::format("fault rate {} outside [0, 1]", r));
  }
}

void CorpusSpec::validate() const {
  if (forecast_ids.empty()) throw ConfigError("corpusgen", "no forecast ids");
  for (const auto& id : forecast_ids) {
    if (id.empty() || id.size() > kForecastIdWidth || id.find_first_of(" /\\,") != std::string::npos) {
      throw ConfigError("corpusgen", fmt::format("bad forecast id '{}'", id));
    }
  }
  if (init_hours.empty()) throw ConfigError("corpusgen", "no init hours");
  for (int h : init_hours) {
    if (h < 0 || h > 23) throw ConfigError("corpusgen", fmt::format("init hour {} outside [0, 24)", h));
  }
  if (horizon_hours < 1) throw ConfigError("corpusgen", "horizon must be at least one hour");
  if (start_date > end_date) throw ConfigError("corpusgen", "start date after end date");
  geometry.validate();
  if (drift) drift->geometry.validate();
  faults.validate();
  if (perturbation < 0.0) throw ConfigError("corpusgen", "negative perturbation amplitude");
}

std::string_view to_string(RunOutcome outcome) {
  switch (outcome) {
    case RunOutcome::ok: return "ok";
    case RunOutcome::missing: return "missing";
    case RunOutcome::html: return "html";
    case RunOutcome::truncated: return "truncated";
  }
  return "unknown";
}

RunOutcome parse_run_outcome(std::string_view text) {
  for (auto o : {RunOutcome::ok, RunOutcome::missing, RunOutcome::html, RunOutcome::truncated}) {
    if (to_string(o) == text) return o;
  }
  throw ConfigError("corpusgen", fmt::format("unknown run outcome '{}'", text));
}

std::size_t CorpusManifest::count(RunOutcome outcome) const {
  return static_cast<std::size_t>(
      std::count_if(runs.begin(), runs.end(), [&](const ScheduledRun& r) { return r.outcome == outcome; }));
}

const ScheduledRun* CorpusManifest::find(std::string_view forecast_id, Instant init) const {
  for (const auto& r : runs) {
    if (r.forecast_id == forecast_id && r.init == init) return &r;
  }
  return nullptr;
}

std::vector<ScheduledRun> schedule_runs(const CorpusSpec& spec) {
  spec.validate();
  const std::set<int> hours_set(spec.init_hours.begin(), spec.init_hours.end());
  std::vector<ScheduledRun> runs;
  for (const auto& id : spec.forecast_ids) {
    const auto own_hour = init_hour_of(id);
    for (auto d = spec.start_date; d <= spec.end_date; d += days{1}) {
      for (int h : hours_set) {
        if (own_hour && !spec.every_id_every_init && *own_hour != h) continue;
        ScheduledRun run;
        run.forecast_id = id;
        run.init = Instant{d} + hours{h};
        run.path = fs::path(id) / fmt::format("{}{:02}", format_compact_date(d), h) / "dispersion.gran";
        run.geometry = (spec.drift && d < spec.drift->cutoff) ? spec.drift->geometry : spec.geometry;
        runs.push_back(std::move(run));
      }
    }
  }
  return runs;
}

namespace {

ForecastGranule build_granule(const CorpusSpec& spec, const ScheduledRun& run,
                              const std::function<const std::vector<double>&(HourStep)>& truth_at) {
  detail::Rng rng(mix_seed(spec.seed, run.forecast_id, run.init.time_since_epoch().count()));
  ForecastGranule g;
  auto& h = g.header;
  h.forecast_id = run.forecast_id;
  h.smoke_init = calendar_to_julian(run.init);
  h.weather_init = calendar_to_julian(run.init - hours{6});
  h.creation = calendar_to_julian(run.init + hours{2} + seconds{static_cast<int>(rng.uniform() * 3600)});
  h.geometry = run.geometry;
  h.ntimes = static_cast<std::uint32_t>(spec.horizon_hours);

  const auto init = HourStep::from_instant(run.init);
  const auto cells = run.geometry.cells();
  g.pm25.reserve(std::size_t{h.ntimes} * cells);
  for (int lead = 0; lead < spec.horizon_hours; ++lead) {
    const auto t = init + hours{lead};
    g.tflag.push_back(calendar_to_julian(t.instant()));
    const auto& truth = truth_at(t);
    const double factor = 1.0 + spec.perturbation * lead * rng.uniform(-1.0, 1.0);
    for (std::size_t i = 0; i < cells; ++i) {
      g.pm25.push_back(static_cast<float>(std::max(0.0, truth[i] * factor)));
    }
  }
  return g;
}

}  // namespace

ForecastGranule make_granule(const CorpusSpec& spec, const TruthModel& truth, const ScheduledRun& run) {
  std::vector<double> scratch;
  return build_granule(spec, run, [&](HourStep t) -> const std::vector<double>& {
    scratch = truth.field(t, run.geometry);
    return scratch;
  });
}

std::string html_error_page() {
  return "<!DOCTYPE html>\n<html>\n<head><title>FireSmoke Canada</title></head>\n"
         "<body>\n<h1>Forecast not available</h1>\n"
         "<p>The requested forecast could not be found. Sometimes forecasts fail to run.</p>\n"
         "</body>\n</html>\n";
}

CorpusManifest generate_corpus(const CorpusSpec& spec, const fs::path& root, int workers) {
  spec.validate();
  std::error_code ec;
  if (fs::exists(root, ec) && !fs::is_empty(root, ec)) {
    throw IoError("corpusgen", fmt::format("corpus root {} is not empty", root.string()));
  }
  fs::create_directories(root, ec);
  if (ec) throw IoError("corpusgen", fmt::format("cannot create {}: {}", root.string(), ec.message()));

  CorpusManifest manifest;
  manifest.runs = schedule_runs(spec);
  const TruthModel truth(spec);

  // Truth fields are shared by every run covering a timestep; compute each
  // (geometry, hour) once.
  std::vector<GridGeometry> geoms{spec.geometry};
  if (spec.drift) geoms.push_back(spec.drift->geometry);
  std::map<std::pair<std::size_t, HourStep>, std::vector<double>> cache;
  std::vector<std::pair<std::size_t, HourStep>> keys;
  for (const auto& run : manifest.runs) {
    const std::size_t gi = run.geometry == spec.geometry ? 0 : 1;
    const auto init = HourStep::from_instant(run.init);
    for (int lead = 0; lead < spec.horizon_hours; ++lead) {
      auto [it, inserted] = cache.try_emplace({gi, init + hours{lead}});
      if (inserted) keys.push_back(it->first);
    }
  }
  detail::parallel_for(keys.size(), workers, [&](std::size_t i) {
    cache.at(keys[i]) = truth.field(keys[i].second, geoms[keys[i].first]);
  });

  const std::string html = html_error_page();
  detail::parallel_for(manifest.runs.size(), workers, [&](std::size_t i) {
    auto& run = manifest.runs[i];
    // Independent stream for fault draws; all four are drawn unconditionally.
    detail::Rng rng(mix_seed(spec.seed ^ 0xFA17FA17ull, run.forecast_id, run.init.time_since_epoch().count()));
    const double u_missing = rng.uniform(), u_html = rng.uniform(), u_trunc = rng.uniform(), u_cut = rng.uniform();
    if (u_missing < spec.faults.missing_run_rate) {
      run.outcome = RunOutcome::missing;
      return;
    }
    const std::size_t gi = run.geometry == spec.geometry ? 0 : 1;
    const auto granule = build_granule(spec, run, [&](HourStep t) -> const std::vector<double>& {
      return cache.at({gi, t});
    });
    auto bytes = encode_granule(granule);
    if (u_html < spec.faults.html_rate) {
      run.outcome = RunOutcome::html;
      bytes.assign(reinterpret_cast<const std::byte*>(html.data()),
                   reinterpret_cast<const std::byte*>(html.data()) + html.size());
    } else if (u_trunc < spec.faults.truncation_rate) {
      run.outcome = RunOutcome::truncated;
      const auto meta = metadata_bytes(granule.header.ntimes);
      const auto payload = bytes.size() - meta;
      bytes.resize(meta + static_cast<std::size_t>(u_cut * static_cast<double>(payload)));
    }
    atomic_write(root / run.path, bytes);
  });

  write_manifest_csv(manifest, root / "manifest.csv");
  return manifest;
}

void write_manifest_csv(const CorpusManifest& manifest, const fs::path& path) {
  std::string out = "forecast_id,init_utc,outcome,path\n";
  for (const auto& r : manifest.runs) {
    out += fmt::format("{},{},{},{}\n", r.forecast_id, format_iso(r.init), to_string(r.outcome), r.path.generic_string());
  }
  atomic_write_text(path, out);
}

CorpusManifest read_manifest_csv(const fs::path& path) {
  const auto table = read_csv(path);
  require_header(table, {"forecast_id", "init_utc", "outcome", "path"}, path.string());
  CorpusManifest manifest;
  for (const auto& row : table.rows) {
    ScheduledRun run;
    run.forecast_id = row[0];
    run.init = parse_iso(row[1]);
    run.outcome = parse_run_outcome(row[2]);
    run.path = row[3];
    manifest.runs.push_back(std::move(run));
  }
  return manifest;
}

}  // namespace smokearchive
