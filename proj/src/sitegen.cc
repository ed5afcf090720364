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

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "rng.h"
#include "smokearchive/corpusgen.h"
#include "smokearchive/fsutil.h"

namespace smokearchive {

using namespace std::chrono;

namespace {

constexpr double kSunrise = 6.0;  // local hours
constexpr double kSunset = 20.0;

double clear_curve_kw(double local_hour, double capacity_kw) {
  if (local_hour <= kSunrise || local_hour >= kSunset) return 0.0;
  return capacity_kw * std::sin(std::numbers::pi * (local_hour - kSunrise) / (kSunset - kSunrise));
}

}  // namespace

SiteObservations synthesize_site(const CorpusSpec& spec, const SiteSpec& site, Date first, Date last) {
  const TruthModel truth(spec);
  SiteObservations obs;
  const auto offset = seconds{static_cast<std::int64_t>(std::lround(site.utc_offset_hours * 3600.0))};
  for (auto d = first; d <= last; d += days{1}) {
    detail::Rng rng(mix_seed(spec.seed, "site", d.time_since_epoch().count()));
    const bool cloudy = rng.uniform() < site.cloudy_day_rate;
    const double cloud = cloudy ? rng.uniform(25.0, 90.0) : rng.uniform(0.0, 15.0);
    const double day_factor = rng.uniform(0.97, 1.03);
    double window_pm = 0.0;
    int window_n = 0;
    for (int q = 0; q < 96; ++q) {
      const double local_hour = q / 4.0;
      const Instant local = Instant{d} + minutes{15 * q};
      const Instant utc = local - offset;
      // Attenuation uses the truth at the middle of the interval.
      const double pm = truth.at(utc + minutes{7} + seconds{30}, site.lat, site.lon);
      double kw = clear_curve_kw(local_hour + 0.125, site.capacity_kw) * day_factor *
                  std::exp(-site.attenuation_per_ugm3 * pm);
      // Cloud passages: deep, irregular dips on cloudy days.
      const double dip = rng.uniform();
      if (cloudy) kw *= 0.35 + 0.65 * dip;
      obs.solar.push_back({utc, kw * 0.25});
      if (local_hour >= 10.0 && local_hour < 16.0 && q % 4 == 0) {
        window_pm += truth.at(utc, site.lat, site.lon);
        ++window_n;
      }
    }
    obs.cloud_pct[d] = cloud;
    obs.smoky[d] = window_n > 0 && window_pm / window_n > site.smoky_threshold_ugm3;
  }
  return obs;
}

void write_site_observations(const SiteObservations& obs, const std::filesystem::path& dir,
                             double utc_offset_hours) {
  std::string solar = "timestamp_iso,energy_kwh\n";
  for (const auto& r : obs.solar) {
    solar += fmt::format("{},{}\n", format_iso_local(r.timestamp, utc_offset_hours), r.energy_kwh);
  }
  std::string cloud = "date,avg_cloud_pct\n";
  for (const auto& [d, pct] : obs.cloud_pct) cloud += fmt::format("{},{}\n", format_date(d), pct);
  std::string flags = "date,smoky\n";
  for (const auto& [d, smoky] : obs.smoky) flags += fmt::format("{},{}\n", format_date(d), smoky ? 1 : 0);
  atomic_write_text(dir / "solar.csv", solar);
  atomic_write_text(dir / "cloud.csv", cloud);
  atomic_write_text(dir / "flags.csv", flags);
}

}  // namespace smokearchive
