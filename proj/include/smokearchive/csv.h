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
#include <string>
#include <string_view>
#include <vector>

namespace smokearchive {

/// Minimal CSV support. None of the files this project reads or writes
/// contain quoted fields, so a field never holds a comma.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Throws ConfigError if the column is absent.
  std::size_t column(std::string_view name) const;
};

std::vector<std::string> split_csv_line(std::string_view line);

/// Reads a CSV file with a header row. Blank lines and lines starting with
/// '#' are skipped; every row must have as many fields as the header.
CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(std::string_view text, std::string_view source_name = "<memory>");

/// Throws ConfigError unless the header equals `expected` exactly.
void require_header(const CsvTable& table, const std::vector<std::string>& expected,
                    std::string_view source_name);

}  // namespace smokearchive
