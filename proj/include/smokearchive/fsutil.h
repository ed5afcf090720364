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

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace smokearchive {

/// Unique sibling path used for write-then-rename commits.
std::filesystem::path temp_sibling(const std::filesystem::path& target);

/// Writes to a temporary sibling and renames over `path`. Parent directories
/// are created. Throws IoError on failure.
void atomic_write(const std::filesystem::path& path, std::span<const std::byte> bytes);
void atomic_write_text(const std::filesystem::path& path, std::string_view text);

std::vector<std::byte> read_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);

inline std::span<const std::byte> as_bytes(std::string_view text) {
  return std::as_bytes(std::span<const char>(text.data(), text.size()));
}

}  // namespace smokearchive
