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
#include <functional>
#include <set>
#include <string>

#include "smokearchive/archive.h"
#include "smokearchive/corpusgen.h"

namespace smokearchive::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Desk-sized spec over [start, start + days - 1].
CorpusSpec small_spec(std::uint64_t seed, int days, Date start = Date{std::chrono::year{2023} / 5 / 10});

/// Julian stamp computed with a month table, independent of the library.
JulianStamp oracle_julian(int year, unsigned month, unsigned day, int hour);

using FieldFn = std::function<float(HourStep t, double lat, double lon)>;

/// Builds `dir`/archive from a single synthetic granule holding `field` on
/// `geometry` for `hours` hours from `start`. Hours in `gaps` are left out
/// of the plan.
Archive make_archive(const std::filesystem::path& dir, const GridGeometry& geometry, HourStep start, int hours,
                     const FieldFn& field, const std::set<HourStep>& gaps = {}, int levels = 1);

}  // namespace smokearchive::testing
