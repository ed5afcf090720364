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
#include <vector>

#include "smokearchive/indexer.h"

namespace smokearchive {

struct SequencePlan {
  HourStep start;
  HourStep end;
  std::map<HourStep, CandidateFrame> picks;
  std::vector<HourStep> gaps;  // ascending

  bool in_range(HourStep t) const { return start <= t && t <= end; }
};

/// For every hour in [start, end], picks the most recent candidate whose
/// smoke init is at or before that hour. Hours with no such candidate are
/// gaps. Throws RangeError when start > end.
SequencePlan plan_sequence(const CoverageIndex& index, HourStep start, HourStep end);

struct RankedCandidate {
  CandidateFrame candidate;
  /// False when the run was initialized after the timestep.
  bool eligible = true;
  bool selected = false;
};

/// Candidates for `t` in recency order with the plan's pick marked. Throws
/// RangeError when `t` is outside the plan.
std::vector<RankedCandidate> explain_pick(const SequencePlan& plan, const CoverageIndex& index, HourStep t);

/// plan.csv: timestep_utc,forecast_id,path,frame_index,smoke_init_utc,resampled_needed
void write_plan_csv(const SequencePlan& plan, const std::optional<GridGeometry>& canonical,
                    const std::filesystem::path& path);
/// gaps.csv: timestep_utc
void write_gaps_csv(const SequencePlan& plan, const std::filesystem::path& path);

/// Reads plan.csv and its gaps.csv. The plan range spans every listed hour.
SequencePlan read_plan_csv(const std::filesystem::path& plan_path, const std::filesystem::path& gaps_path);

}  // namespace smokearchive
