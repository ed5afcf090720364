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

#include "smokearchive/fsutil.h"

#include <atomic>
#include <fstream>
#include <system_error>

#include <fmt/format.h>
#include <unistd.h>

#include "smokearchive/error.h"

namespace smokearchive {

namespace fs = std::filesystem;

fs::path temp_sibling(const fs::path& target) {
  static std::atomic<unsigned long> counter{0};
  auto name = target.filename().string();
  return target.parent_path() / fmt::format(".{}.tmp-{}-{}", name, ::getpid(), counter++);
}

void atomic_write(const fs::path& path, std::span<const std::byte> bytes) {
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("io", fmt::format("cannot create {}: {}", path.parent_path().string(), ec.message()));
  }
  const auto tmp = temp_sibling(path);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("io", fmt::format("cannot open {} for writing", tmp.string()));
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      throw IoError("io", fmt::format("write to {} failed", tmp.string()));
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw IoError("io", fmt::format("cannot commit {}: {}", path.string(), ec.message()));
  }
}

void atomic_write_text(const fs::path& path, std::string_view text) { atomic_write(path, as_bytes(text)); }

std::vector<std::byte> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("io", fmt::format("cannot open {}", path.string()));
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  std::vector<std::byte> out(size);
  in.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(size));
  if (!in) throw IoError("io", fmt::format("cannot read {}", path.string()));
  return out;
}

std::string read_text_file(const fs::path& path) {
  const auto bytes = read_file(path);
  return std::string(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

}  // namespace smokearchive
