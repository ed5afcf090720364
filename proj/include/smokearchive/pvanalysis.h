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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smokearchive/error.h"
#include "smokearchive/timecal.h"

namespace smokearchive {

class Archive;
enum class SamplingMode;

/// Energy produced over the 15 minutes starting at `timestamp`.
struct SolarRecord {
  Instant timestamp{};
  double energy_kwh = 0.0;
};

struct AnalysisOptions {
  /// Fixed local offset; MDT is UTC-6.
  double utc_offset_hours = -6.0;
  int window_start_hour = 10;  // local, inclusive
  int window_end_hour = 16;    // local, exclusive
  double clear_sky_threshold = 0.01;
  double cloud_max_pct = 20.0;
  int pairing_days = 7;
  std::size_t min_window_records = 8;
};

enum class AnalysisErrorKind { insufficient_data, empty_join, degenerate_reference, pairing, fit };

class AnalysisError : public Error {
 public:
  AnalysisError(AnalysisErrorKind kind, const std::string& message) : Error("pvanalysis", message), kind_(kind) {}
  AnalysisErrorKind kind() const noexcept { return kind_; }

 private:
  AnalysisErrorKind kind_;
};

struct ClearSkyResult {
  bool clear = false;
  /// Sum of squared second differences over sum of squares, daylight records
  /// only. Infinite for a day with no production.
  double score = 0.0;
};

/// `day` holds one local day of records in time order.
ClearSkyResult classify_clear_sky(std::span<const SolarRecord> day, const AnalysisOptions& options = {});

struct DailyAggregate {
  Date date{};  // local
  double avg_output_kw = 0.0;
  double avg_pm25 = 0.0;
  double avg_cloud_pct = 0.0;
  bool clear_sky = false;
  bool smoky = false;
  double smoothness = 0.0;
};

struct DayExclusion {
  Date date{};
  std::string reason;
};

struct DailyAggregates {
  std::vector<DailyAggregate> days;
  std::vector<DayExclusion> excluded;
};

struct Site {
  double lat = 0.0;
  double lon = 0.0;
};

/// Per-day means over the local peak window. PM2.5 is sampled hourly from
/// the archive; any day with a PM2.5 gap in its window is dropped and listed.
DailyAggregates daily_aggregates(std::span<const SolarRecord> solar, const std::map<Date, double>& cloud_pct,
                                 const std::map<Date, bool>& smoky, const Archive& archive, Site site,
                                 SamplingMode mode, const AnalysisOptions& options = {});

/// smoky.avg_output / reference.avg_output.
double output_ratio(const DailyAggregate& smoky, const DailyAggregate& reference,
                    const AnalysisOptions& options = {});

/// Nearest clear, non-smoky day within the pairing window, excluding `day`
/// itself; equal distances resolve to the earlier day.
std::optional<std::size_t> find_reference_day(std::span<const DailyAggregate> days, std::size_t day,
                                              const AnalysisOptions& options = {});

struct FitPoint {
  double pm25 = 0.0;
  double ratio = 0.0;
  double cloud_pct = 0.0;
};

struct RegressionFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t n_points = 0;
};

/// Ordinary least squares of ratio on PM2.5 over points with
/// cloud_pct <= cloud_max.
RegressionFit fit_regression(std::span<const FitPoint> points, double cloud_max_pct = 20.0);

struct ReportRow {
  DailyAggregate day;
  std::optional<double> ratio;
  std::optional<Date> reference;
  bool used_in_fit = false;
};

struct AnalysisReport {
  std::vector<ReportRow> rows;
  std::vector<DayExclusion> excluded;
  std::optional<RegressionFit> fit;
  std::string fit_error;
};

/// Aggregates, pairs smoky days with clear references, and fits. When
/// `smoky` is empty every day with a reference is a fit candidate.
AnalysisReport analyze(std::span<const SolarRecord> solar, const std::map<Date, double>& cloud_pct,
                       const std::map<Date, bool>& smoky, const Archive& archive, Site site, SamplingMode mode,
                       const AnalysisOptions& options = {});

void write_report_csv(const AnalysisReport& report, const std::filesystem::path& path);

// ---- CSV inputs ------------------------------------------------------------

std::vector<SolarRecord> read_solar_csv(const std::filesystem::path& path);
std::map<Date, double> read_cloud_csv(const std::filesystem::path& path);
std::map<Date, bool> read_flags_csv(const std::filesystem::path& path);

/// "YYYY-MM-DDTHH:MM:SS+HH:MM" in the given fixed offset.
std::string format_iso_local(Instant instant, double utc_offset_hours);
/// Local calendar date of `instant` under a fixed offset.
Date local_date(Instant instant, double utc_offset_hours);

}  // namespace smokearchive
