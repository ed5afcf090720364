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

#include "smokearchive/pvanalysis.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "smokearchive/archive.h"
#include "smokearchive/csv.h"
#include "smokearchive/fsutil.h"
#include "smokearchive/query.h"

namespace smokearchive {

namespace fs = std::filesystem;
using std::chrono::seconds;

namespace {

seconds offset_of(double utc_offset_hours) {
  return seconds(static_cast<std::int64_t>(std::llround(utc_offset_hours * 3600.0)));
}

/// Local time of day in hours.
double local_hour(Instant t, double utc_offset_hours) {
  const auto local = t + offset_of(utc_offset_hours);
  const auto since_midnight = local - std::chrono::floor<std::chrono::days>(local);
  return static_cast<double>(since_midnight.count()) / 3600.0;
}

bool in_window(Instant t, const AnalysisOptions& o) {
  const double h = local_hour(t, o.utc_offset_hours);
  return h >= o.window_start_hour && h < o.window_end_hour;
}

double parse_number(const std::string& text, const fs::path& path, std::size_t line) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(v)) {
    throw ConfigError("pvanalysis", fmt::format("{}: row {}: bad number '{}'", path.string(), line, text));
  }
  return v;
}

}  // namespace

std::string format_iso_local(Instant instant, double utc_offset_hours) {
  const auto off = offset_of(utc_offset_hours);
  const auto local = instant + off;
  const auto day = std::chrono::floor<std::chrono::days>(local);
  const std::chrono::year_month_day ymd{day};
  const std::chrono::hh_mm_ss hms{local - day};
  const auto off_min = off.count() / 60;
  const auto abs_min = off_min < 0 ? -off_min : off_min;
  return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}{}{:02}:{:02}", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), hms.hours().count(),
                     hms.minutes().count(), hms.seconds().count(), off_min < 0 ? '-' : '+', abs_min / 60,
                     abs_min % 60);
}

Date local_date(Instant instant, double utc_offset_hours) {
  return std::chrono::floor<std::chrono::days>(instant + offset_of(utc_offset_hours));
}

ClearSkyResult classify_clear_sky(std::span<const SolarRecord> day, const AnalysisOptions& options) {
  const auto window = static_cast<std::size_t>(
      std::count_if(day.begin(), day.end(), [&](const SolarRecord& r) { return in_window(r.timestamp, options); }));
  if (window < options.min_window_records) {
    throw AnalysisError(AnalysisErrorKind::insufficient_data,
                        fmt::format("{} records in the peak window, need {}", window, options.min_window_records));
  }
  // Daylight: first through last producing interval.
  std::size_t lo = 0, hi = day.size();
  while (lo < hi && day[lo].energy_kwh <= 0.0) ++lo;
  while (hi > lo && day[hi - 1].energy_kwh <= 0.0) --hi;
  ClearSkyResult out;
  double energy = 0.0;
  for (std::size_t i = lo; i < hi; ++i) energy += day[i].energy_kwh * day[i].energy_kwh;
  if (hi - lo < 3 || energy <= 0.0) {
    out.score = std::numeric_limits<double>::infinity();
    return out;
  }
  double rough = 0.0;
  for (std::size_t i = lo + 1; i + 1 < hi; ++i) {
    const double d2 = day[i - 1].energy_kwh - 2.0 * day[i].energy_kwh + day[i + 1].energy_kwh;
    rough += d2 * d2;
  }
  out.score = rough / energy;
  out.clear = out.score <= options.clear_sky_threshold;
  return out;
}

DailyAggregates daily_aggregates(std::span<const SolarRecord> solar, const std::map<Date, double>& cloud_pct,
                                 const std::map<Date, bool>& smoky, const Archive& archive, Site site,
                                 SamplingMode mode, const AnalysisOptions& options) {
  std::map<Date, std::vector<SolarRecord>> by_day;
  for (const auto& r : solar) by_day[local_date(r.timestamp, options.utc_offset_hours)].push_back(r);

  DailyAggregates out;
  bool overlap = false;
  for (auto& [date, records] : by_day) {
    std::sort(records.begin(), records.end(),
              [](const SolarRecord& a, const SolarRecord& b) { return a.timestamp < b.timestamp; });
    const auto cloud = cloud_pct.find(date);
    if (cloud == cloud_pct.end()) {
      out.excluded.push_back({date, "no cloud record"});
      continue;
    }
    overlap = true;

    double output = 0.0;
    std::size_t n = 0;
    for (const auto& r : records) {
      if (!in_window(r.timestamp, options)) continue;
      output += r.energy_kwh * 4.0;  // kWh per 15 min -> mean kW
      ++n;
    }
    if (n < options.min_window_records) {
      out.excluded.push_back({date, fmt::format("{} solar records in the peak window", n)});
      continue;
    }

    const auto local_midnight = Instant(date.time_since_epoch()) - offset_of(options.utc_offset_hours);
    const auto t0 = HourStep::from_instant(local_midnight + std::chrono::hours(options.window_start_hour));
    const auto t1 = HourStep::from_instant(local_midnight + std::chrono::hours(options.window_end_hour - 1));
    if (!archive.in_range(t0) || !archive.in_range(t1)) {
      out.excluded.push_back({date, "peak window outside archive range"});
      continue;
    }
    const auto series = sample_series(archive, t0, t1, site.lat, site.lon, mode);
    if (!series.gaps.empty()) {
      out.excluded.push_back({date, fmt::format("PM2.5 gap at {}", format_iso(series.gaps.front()))});
      continue;
    }

    DailyAggregate a;
    a.date = date;
    a.avg_output_kw = output / static_cast<double>(n);
    double pm = 0.0;
    for (const auto& [t, v] : series.values) pm += v;
    a.avg_pm25 = pm / static_cast<double>(series.values.size());
    a.avg_cloud_pct = cloud->second;
    const auto flag = smoky.find(date);
    a.smoky = flag != smoky.end() && flag->second;
    const auto cs = classify_clear_sky(records, options);
    a.clear_sky = cs.clear;
    a.smoothness = cs.score;
    out.days.push_back(a);
  }
  if (!overlap) {
    throw AnalysisError(AnalysisErrorKind::empty_join, "solar and cloud records share no dates");
  }
  return out;
}

double output_ratio(const DailyAggregate& smoky, const DailyAggregate& reference, const AnalysisOptions& options) {
  if (!reference.clear_sky) {
    throw AnalysisError(AnalysisErrorKind::degenerate_reference,
                        fmt::format("reference {} is not a clear-sky day", format_date(reference.date)));
  }
  if (!(reference.avg_output_kw > 0.0)) {
    throw AnalysisError(AnalysisErrorKind::degenerate_reference,
                        fmt::format("reference {} has output {}", format_date(reference.date), reference.avg_output_kw));
  }
  const auto apart = std::chrono::abs(smoky.date - reference.date).count();
  if (apart > options.pairing_days) {
    throw AnalysisError(AnalysisErrorKind::pairing,
                        fmt::format("{} and {} are {} days apart, limit {}", format_date(smoky.date),
                                    format_date(reference.date), apart, options.pairing_days));
  }
  return smoky.avg_output_kw / reference.avg_output_kw;
}

std::optional<std::size_t> find_reference_day(std::span<const DailyAggregate> days, std::size_t day,
                                              const AnalysisOptions& options) {
  std::optional<std::size_t> best;
  long best_distance = 0;
  for (std::size_t j = 0; j < days.size(); ++j) {
    if (j == day) continue;
    const auto& d = days[j];
    if (!d.clear_sky || d.smoky || !(d.avg_output_kw > 0.0)) continue;
    const long distance = std::chrono::abs(d.date - days[day].date).count();
    if (distance == 0 || distance > options.pairing_days) continue;
    if (!best || distance < best_distance || (distance == best_distance && d.date < days[*best].date)) {
      best = j;
      best_distance = distance;
    }
  }
  return best;
}

RegressionFit fit_regression(std::span<const FitPoint> points, double cloud_max_pct) {
  std::vector<FitPoint> kept;
  for (const auto& p : points) {
    if (p.cloud_pct <= cloud_max_pct) kept.push_back(p);
  }
  if (kept.size() < 2) {
    throw AnalysisError(AnalysisErrorKind::fit, fmt::format("{} points after cloud filter, need 2", kept.size()));
  }
  const double n = static_cast<double>(kept.size());
  double mx = 0.0, my = 0.0;
  for (const auto& p : kept) {
    mx += p.pm25;
    my += p.ratio;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& p : kept) {
    const double dx = p.pm25 - mx, dy = p.ratio - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw AnalysisError(AnalysisErrorKind::fit, "PM2.5 values have zero variance");
  RegressionFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0.0 ? 0.0 : std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
  fit.n_points = kept.size();
  return fit;
}

AnalysisReport analyze(std::span<const SolarRecord> solar, const std::map<Date, double>& cloud_pct,
                       const std::map<Date, bool>& smoky, const Archive& archive, Site site, SamplingMode mode,
                       const AnalysisOptions& options) {
  auto aggregates = daily_aggregates(solar, cloud_pct, smoky, archive, site, mode, options);
  AnalysisReport report;
  report.excluded = std::move(aggregates.excluded);
  const auto& days = aggregates.days;
  std::vector<FitPoint> points;
  for (std::size_t i = 0; i < days.size(); ++i) {
    ReportRow row;
    row.day = days[i];
    const bool candidate = smoky.empty() || days[i].smoky;
    if (candidate) {
      if (const auto ref = find_reference_day(days, i, options)) {
        row.reference = days[*ref].date;
        row.ratio = output_ratio(days[i], days[*ref], options);
        row.used_in_fit = days[i].avg_cloud_pct <= options.cloud_max_pct;
        points.push_back({days[i].avg_pm25, *row.ratio, days[i].avg_cloud_pct});
      }
    }
    report.rows.push_back(std::move(row));
  }
  try {
    report.fit = fit_regression(points, options.cloud_max_pct);
  } catch (const AnalysisError& e) {
    report.fit_error = e.what();
  }
  return report;
}

void write_report_csv(const AnalysisReport& report, const fs::path& path) {
  std::string out = "date,avg_pm25,avg_output,ratio,clear_sky,used_in_fit\n";
  for (const auto& r : report.rows) {
    out += fmt::format("{},{},{},{},{},{}\n", format_date(r.day.date), r.day.avg_pm25, r.day.avg_output_kw,
                       r.ratio ? fmt::format("{}", *r.ratio) : "", r.day.clear_sky ? 1 : 0, r.used_in_fit ? 1 : 0);
  }
  out += "\nslope,intercept,r2,n\n";
  if (report.fit) {
    out += fmt::format("{},{},{},{}\n", report.fit->slope, report.fit->intercept, report.fit->r_squared,
                       report.fit->n_points);
  } else {
    out += "nan,nan,nan,0\n";
  }
  atomic_write_text(path, out);
}

std::vector<SolarRecord> read_solar_csv(const fs::path& path) {
  const auto t = read_csv(path);
  require_header(t, {"timestamp_iso", "energy_kwh"}, path.string());
  std::vector<SolarRecord> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    SolarRecord r;
    r.timestamp = parse_iso(t.rows[i][0]);
    r.energy_kwh = parse_number(t.rows[i][1], path, i + 1);
    if (r.energy_kwh < 0.0) {
      throw ConfigError("pvanalysis", fmt::format("{}: row {}: negative energy", path.string(), i + 1));
    }
    out.push_back(r);
  }
  std::sort(out.begin(), out.end(), [](const SolarRecord& a, const SolarRecord& b) { return a.timestamp < b.timestamp; });
  return out;
}

std::map<Date, double> read_cloud_csv(const fs::path& path) {
  const auto t = read_csv(path);
  require_header(t, {"date", "avg_cloud_pct"}, path.string());
  std::map<Date, double> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const double v = parse_number(t.rows[i][1], path, i + 1);
    if (v < 0.0 || v > 100.0) {
      throw ConfigError("pvanalysis", fmt::format("{}: row {}: cloud cover {} outside 0..100", path.string(), i + 1, v));
    }
    out[parse_date(t.rows[i][0])] = v;
  }
  return out;
}

std::map<Date, bool> read_flags_csv(const fs::path& path) {
  const auto t = read_csv(path);
  require_header(t, {"date", "smoky"}, path.string());
  std::map<Date, bool> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& v = t.rows[i][1];
    if (v != "0" && v != "1") {
      throw ConfigError("pvanalysis", fmt::format("{}: row {}: smoky must be 0 or 1", path.string(), i + 1));
    }
    out[parse_date(t.rows[i][0])] = v == "1";
  }
  return out;
}

}  // namespace smokearchive
