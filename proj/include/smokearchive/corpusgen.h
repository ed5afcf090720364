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
#include <span>
#include <string>
#include <vector>

#include "smokearchive/granule.h"
#include "smokearchive/pvanalysis.h"
#include "smokearchive/timecal.h"

namespace smokearchive {

// ---- geometry presets ------------------------------------------------------

/// 20 x 40 at 0.5 degrees over western Canada; keeps corpora small.
GridGeometry desk_geometry();
/// Same origin and spacing, four columns narrower.
GridGeometry desk_drift_geometry();
/// 381 x 1081 at 0.1 degrees from (32N, 160W).
GridGeometry full_geometry();
/// 381 x 1041, the early-season grid.
GridGeometry full_drift_geometry();

std::vector<std::string> default_forecast_ids();

/// Init hour embedded in a BSCnn... forecast id, if any.
std::optional<int> init_hour_of(std::string_view forecast_id);

// ---- smoke model -----------------------------------------------------------

struct FireSource {
  double lat = 0.0;
  double lon = 0.0;
  double strength = 0.0;  // peak concentration, ug/m^3
  Instant ignition{};
};

/// Degrees per hour; u is eastward, v northward.
struct Wind {
  double u = 0.0;
  double v = 0.0;
};

struct PlumeModel {
  double sigma0 = 0.2;        // degrees
  double spread_rate = 0.05;  // degrees per hour
};

/// Gaussian puff of one source `elapsed_hours` after ignition, evaluated at
/// (lat, lon).
double puff_value(const FireSource& source, Wind wind, double elapsed_hours, double lat, double lon,
                  const PlumeModel& model = {});

/// Sum of advected, spreading Gaussian puffs over the grid, row-major.
/// Throws RangeError if any source ignites after `t`.
std::vector<double> puff_field(std::span<const FireSource> sources, Wind wind, HourStep t,
                               const GridGeometry& geom, const PlumeModel& model = {});

// ---- corpus ----------------------------------------------------------------

struct FaultProfile {
  double missing_run_rate = 0.05;
  double html_rate = 0.02;
  double truncation_rate = 0.02;

  static FaultProfile none() { return {0.0, 0.0, 0.0}; }
  void validate() const;
};

struct DriftSchedule {
  GridGeometry geometry;
  Date cutoff{};  // runs initialized before this date use `geometry`
};

struct CorpusSpec {
  std::vector<std::string> forecast_ids = default_forecast_ids();
  Date start_date{};
  Date end_date{};
  std::vector<int> init_hours{0, 6, 12, 18};
  int horizon_hours = 84;
  GridGeometry geometry = desk_geometry();
  std::optional<DriftSchedule> drift;
  FaultProfile faults;
  std::uint64_t seed = 0;

  /// By default an id that names its init hour (BSC06...) runs only at that
  /// hour; ids without one run at every init hour. Setting this makes every
  /// id run at every init hour.
  bool every_id_every_init = false;

  // Ground-truth smoke model.
  std::optional<std::vector<FireSource>> fires;  // generated from seed when empty
  std::optional<Wind> wind;
  double fires_per_day = 1.0;
  double fire_lifetime_hours = 48.0;
  double background_pm25 = 1.0;
  /// Forecast error amplitude per hour of lead time, relative to the truth.
  double perturbation = 0.02;
  PlumeModel plume;

  void validate() const;
};

enum class RunOutcome { ok, missing, html, truncated };

std::string_view to_string(RunOutcome outcome);
RunOutcome parse_run_outcome(std::string_view text);

struct ScheduledRun {
  std::string forecast_id;
  Instant init{};
  RunOutcome outcome = RunOutcome::ok;
  std::filesystem::path path;  // relative to the corpus root
  GridGeometry geometry;
};

struct CorpusManifest {
  std::vector<ScheduledRun> runs;

  std::size_t count(RunOutcome outcome) const;
  const ScheduledRun* find(std::string_view forecast_id, Instant init) const;
};

/// Truth fields shared by every run of a corpus.
class TruthModel {
 public:
  explicit TruthModel(const CorpusSpec& spec);

  const std::vector<FireSource>& fires() const { return fires_; }
  Wind wind() const { return wind_; }

  /// Background plus every fire burning at `t`.
  double at(Instant t, double lat, double lon) const;
  std::vector<double> field(HourStep t, const GridGeometry& geom) const;

 private:
  std::vector<FireSource> active(Instant t) const;

  std::vector<FireSource> fires_;
  Wind wind_;
  double lifetime_hours_;
  double background_;
  PlumeModel plume_;
};

/// Scheduled runs in (forecast_id, init) order, all marked ok.
std::vector<ScheduledRun> schedule_runs(const CorpusSpec& spec);

/// The fault-free granule a run would produce.
ForecastGranule make_granule(const CorpusSpec& spec, const TruthModel& truth, const ScheduledRun& run);

/// Writes root/{id}/{YYYYMMDD}{HH}/dispersion.gran per non-missing run plus
/// root/manifest.csv. Same spec and seed give a byte-identical tree for any
/// worker count. Throws IoError if root exists and is not empty.
CorpusManifest generate_corpus(const CorpusSpec& spec, const std::filesystem::path& root, int workers = 1);

void write_manifest_csv(const CorpusManifest& manifest, const std::filesystem::path& path);
CorpusManifest read_manifest_csv(const std::filesystem::path& path);

/// Bytes a portal serves in place of a missing granule.
std::string html_error_page();

// ---- site observations for the PV analysis ----------------------------------

struct SiteSpec {
  double lat = 51.05;
  double lon = -114.07;
  double capacity_kw = 57.0;
  /// Output multiplier is exp(-attenuation * PM2.5).
  double attenuation_per_ugm3 = 0.01;
  double cloudy_day_rate = 0.25;
  /// Days whose mean truth PM2.5 over the peak window exceeds this are flagged smoky.
  double smoky_threshold_ugm3 = 10.0;
  double utc_offset_hours = -6.0;
};

struct SiteObservations {
  std::vector<SolarRecord> solar;
  std::map<Date, double> cloud_pct;
  std::map<Date, bool> smoky;
};

/// 15-minute PV production for local days [first, last], attenuated by the
/// corpus truth PM2.5 at the site, plus daily cloud cover and smoke flags.
SiteObservations synthesize_site(const CorpusSpec& spec, const SiteSpec& site, Date first, Date last);

/// Writes solar.csv, cloud.csv and flags.csv into `dir`.
void write_site_observations(const SiteObservations& obs, const std::filesystem::path& dir,
                             double utc_offset_hours);

/// Stable 64-bit mixing used to derive per-run seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::string_view tag, std::int64_t value);

}  // namespace smokearchive
