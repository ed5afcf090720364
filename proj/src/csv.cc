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

#include "smokearchive/csv.h"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "smokearchive/error.h"
#include "smokearchive/fsutil.h"

namespace smokearchive {

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw ConfigError("csv", fmt::format("missing column '{}'", name));
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    auto field = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    out.emplace_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

CsvTable parse_csv(std::string_view text, std::string_view source_name) {
  CsvTable table;
  bool have_header = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    auto line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') {
      if (eol == text.size()) break;
      continue;
    }
    auto fields = split_csv_line(line);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
    } else {
      if (fields.size() != table.header.size()) {
        throw ConfigError("csv", fmt::format("{}:{}: expected {} fields, found {}", source_name, line_no,
                                             table.header.size(), fields.size()));
      }
      table.rows.push_back(std::move(fields));
    }
    if (eol == text.size()) break;
  }
  if (!have_header) throw ConfigError("csv", fmt::format("{}: empty file", source_name));
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(read_text_file(path), path.string()); }

void require_header(const CsvTable& table, const std::vector<std::string>& expected,
                    std::string_view source_name) {
  if (table.header != expected) {
    throw ConfigError("csv", fmt::format("{}: header must be '{}', found '{}'", source_name,
                                         fmt::join(expected, ","), fmt::join(table.header, ",")));
  }
}

}  // namespace smokearchive
