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

#include "smokearchive/sequencer.h"

#include <charconv>

#include <fmt/format.h>

#include "smokearchive/csv.h"
#include "smokearchive/fsutil.h"

namespace smokearchive {

namespace fs = std::filesystem;

SequencePlan plan_sequence(const CoverageIndex& index, HourStep start, HourStep end) {
  if (start > end) {
    throw RangeError("sequencer", fmt::format("sequence start {} after end {}", format_iso(start), format_iso(end)));
  }
  SequencePlan plan;
  plan.start = start;
  plan.end = end;
  for (const auto t : hour_range(start, end)) {
    // Lists are newest first, so the first eligible candidate is the pick.
    const CandidateFrame* pick = nullptr;
    for (const auto& c : index.candidates(t)) {
      if (c.smoke_init <= t.instant()) {
        pick = &c;
        break;
      }
    }
    if (pick) {
      plan.picks.emplace(t, *pick);
    } else {
      plan.gaps.push_back(t);
    }
  }
  return plan;
}

std::vector<RankedCandidate> explain_pick(const SequencePlan& plan, const CoverageIndex& index, HourStep t) {
  if (!plan.in_range(t)) {
    throw RangeError("sequencer", fmt::format("{} outside plan range {} .. {}", format_iso(t), format_iso(plan.start),
                                              format_iso(plan.end)));
  }
  const auto pick = plan.picks.find(t);
  std::vector<RankedCandidate> out;
  for (const auto& c : index.candidates(t)) {
    RankedCandidate r;
    r.candidate = c;
    r.eligible = c.smoke_init <= t.instant();
    r.selected = pick != plan.picks.end() && pick->second == c;
    out.push_back(std::move(r));
  }
  return out;
}

void write_plan_csv(const SequencePlan& plan, const std::optional<GridGeometry>& canonical, const fs::path& path) {
  std::string out = "timestep_utc,forecast_id,path,frame_index,smoke_init_utc,resampled_needed\n";
  for (const auto& [t, c] : plan.picks) {
    const bool resample = canonical.has_value() && !(c.geometry == *canonical);
    out += fmt::format("{},{},{},{},{},{}\n", format_iso(t), c.forecast_id, c.path.generic_string(), c.frame_index,
                       format_iso(c.smoke_init), resample ? 1 : 0);
  }
  atomic_write_text(path, out);
}

void write_gaps_csv(const SequencePlan& plan, const fs::path& path) {
  std::string out = "timestep_utc\n";
  for (const auto t : plan.gaps) out += format_iso(t) + "\n";
  atomic_write_text(path, out);
}

SequencePlan read_plan_csv(const fs::path& plan_path, const fs::path& gaps_path) {
  const auto table = read_csv(plan_path);
  require_header(table,
                 {"timestep_utc", "forecast_id", "path", "frame_index", "smoke_init_utc", "resampled_needed"},
                 plan_path.string());
  SequencePlan plan;
  for (const auto& row : table.rows) {
    CandidateFrame c;
    c.forecast_id = row[1];
    c.path = row[2];
    auto [ptr, ec] = std::from_chars(row[3].data(), row[3].data() + row[3].size(), c.frame_index);
    if (ec != std::errc{} || ptr != row[3].data() + row[3].size()) {
      throw ConfigError("sequencer", fmt::format("{}: bad frame index '{}'", plan_path.string(), row[3]));
    }
    c.smoke_init = parse_iso(row[4]);
    const auto t = parse_hour(row[0]);
    if (!plan.picks.emplace(t, std::move(c)).second) {
      throw ConfigError("sequencer", fmt::format("{}: duplicate timestep {}", plan_path.string(), row[0]));
    }
  }
  if (fs::exists(gaps_path)) {
    const auto gaps = read_csv(gaps_path);
    require_header(gaps, {"timestep_utc"}, gaps_path.string());
    for (const auto& row : gaps.rows) plan.gaps.push_back(parse_hour(row[0]));
    std::sort(plan.gaps.begin(), plan.gaps.end());
  }
  if (plan.picks.empty() && plan.gaps.empty()) {
    throw ConfigError("sequencer", fmt::format("{}: plan is empty", plan_path.string()));
  }
  std::optional<HourStep> lo, hi;
  auto widen = [&](HourStep t) {
    if (!lo || t < *lo) lo = t;
    if (!hi || t > *hi) hi = t;
  };
  for (const auto& [t, c] : plan.picks) widen(t);
  for (const auto t : plan.gaps) widen(t);
  plan.start = *lo;
  plan.end = *hi;
  const auto expected = static_cast<std::size_t>((plan.end - plan.start).count()) + 1;
  if (plan.picks.size() + plan.gaps.size() != expected) {
    throw ConfigError("sequencer", fmt::format("{}: picks and gaps do not cover {} .. {} exactly", plan_path.string(),
                                               format_iso(plan.start), format_iso(plan.end)));
  }
  return plan;
}

}  // namespace smokearchive
