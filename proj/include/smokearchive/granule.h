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
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "smokearchive/error.h"
#include "smokearchive/timecal.h"

namespace smokearchive {

/// Regular plate-carree lat/lon grid anchored at its south-west corner.
struct GridGeometry {
  std::uint32_t nrows = 0;  // latitude points
  std::uint32_t ncols = 0;  // longitude points
  double lat0 = 0.0;
  double lon0 = 0.0;
  double dlat = 0.0;
  double dlon = 0.0;

  double lat_max() const { return lat0 + (nrows - 1) * dlat; }
  double lon_max() const { return lon0 + (ncols - 1) * dlon; }
  std::size_t cells() const { return std::size_t{nrows} * ncols; }

  /// Throws GeometryError when the grid is degenerate or out of bounds.
  void validate() const;

  /// Exact comparison: all six fields must match bit for bit.
  friend bool operator==(const GridGeometry& a, const GridGeometry& b) noexcept;
};

std::string describe(const GridGeometry& g);

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;
};

/// Throws RangeError when (row, col) is outside the grid.
LatLon grid_coordinates(const GridGeometry& geom, std::size_t row, std::size_t col);

struct GranuleHeader {
  std::string forecast_id;
  JulianStamp creation;      // CDATE / CTIME
  JulianStamp weather_init;  // WDATE / WTIME
  JulianStamp smoke_init;    // SDATE / STIME
  GridGeometry geometry;
  std::uint32_t ntimes = 0;

  friend bool operator==(const GranuleHeader&, const GranuleHeader&) = default;
};

/// One forecast run: header, per-frame timestamps and hourly PM2.5 frames
/// (ug/m^3), stored time-major then row-major.
struct ForecastGranule {
  GranuleHeader header;
  std::vector<JulianStamp> tflag;
  std::vector<float> pm25;

  std::span<const float> frame(std::size_t t) const {
    const auto n = header.geometry.cells();
    return std::span<const float>(pm25).subspan(t * n, n);
  }

  friend bool operator==(const ForecastGranule&, const ForecastGranule&) = default;
};

// ---- on-disk layout --------------------------------------------------------

inline constexpr char kGranuleMagic[8] = {'S', 'M', 'O', 'K', 'G', 'R', 'A', 'N'};
inline constexpr std::uint32_t kGranuleVersion = 1;
inline constexpr std::size_t kForecastIdWidth = 16;
inline constexpr std::size_t kGranuleHeaderBytes = 96;
inline constexpr std::size_t kTflagEntryBytes = 8;

inline constexpr std::uint64_t metadata_bytes(std::uint32_t ntimes) {
  return kGranuleHeaderBytes + std::uint64_t{ntimes} * kTflagEntryBytes;
}

// ---- errors ----------------------------------------------------------------

enum class GranuleErrorKind { not_a_granule, truncated, invalid_header, invalid_payload };

std::string_view to_string(GranuleErrorKind kind);

class GranuleError : public Error {
 public:
  GranuleError(GranuleErrorKind kind, std::uint64_t offset, const std::string& detail);

  GranuleErrorKind kind() const noexcept { return kind_; }
  /// Byte offset of the first inconsistency.
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  GranuleErrorKind kind_;
  std::uint64_t offset_;
};

// ---- byte sources ----------------------------------------------------------

class ByteSource {
 public:
  virtual ~ByteSource() = default;
  /// Reads up to out.size() bytes; a short count means end of stream.
  virtual std::size_t read(std::span<std::byte> out) = 0;
};

class MemorySource final : public ByteSource {
 public:
  explicit MemorySource(std::span<const std::byte> bytes) : bytes_(bytes) {}
  std::size_t read(std::span<std::byte> out) override;

 private:
  std::span<const std::byte> bytes_;
  std::size_t pos_ = 0;
};

/// Unbuffered file reader: every byte delivered is a byte requested from
/// the OS, so counting sources measure real I/O.
class FileSource final : public ByteSource {
 public:
  /// Throws IoError if the file cannot be opened.
  explicit FileSource(const std::filesystem::path& path);
  ~FileSource() override;
  FileSource(const FileSource&) = delete;
  FileSource& operator=(const FileSource&) = delete;

  std::size_t read(std::span<std::byte> out) override;

 private:
  int fd_ = -1;
};

/// Forwards to another source and counts the bytes it delivered.
class CountingSource final : public ByteSource {
 public:
  explicit CountingSource(ByteSource& inner) : inner_(inner) {}
  std::size_t read(std::span<std::byte> out) override {
    const auto n = inner_.read(out);
    count_ += n;
    return n;
  }
  std::uint64_t count() const noexcept { return count_; }

 private:
  ByteSource& inner_;
  std::uint64_t count_ = 0;
};

// ---- operations ------------------------------------------------------------

/// Result of a metadata-only read.
struct HeaderRead {
  GranuleHeader header;
  std::vector<JulianStamp> tflag;

  std::uint64_t metadata_bytes() const { return smokearchive::metadata_bytes(header.ntimes); }
  std::uint64_t expected_payload_bytes() const {
    return std::uint64_t{header.ntimes} * header.geometry.cells() * sizeof(float);
  }
  std::uint64_t expected_total_bytes() const { return metadata_bytes() + expected_payload_bytes(); }
};

/// Throws GranuleError (invalid_header / invalid_payload) if `g` violates an
/// invariant.
void validate(const ForecastGranule& g);

/// Validates, then serializes. Returns the number of bytes written.
std::uint64_t write_granule(const ForecastGranule& g, std::ostream& out);
std::vector<std::byte> encode_granule(const ForecastGranule& g);
/// Atomic (temp file + rename).
void write_granule_file(const ForecastGranule& g, const std::filesystem::path& path);

/// Safe on arbitrary input; never reads past the declared payload.
ForecastGranule parse_granule(ByteSource& source);
ForecastGranule parse_granule(std::span<const std::byte> bytes);
ForecastGranule parse_granule_file(const std::filesystem::path& path);

/// Reads magic, header and TFLAG only.
HeaderRead read_header(ByteSource& source);
HeaderRead read_header(std::span<const std::byte> bytes);

}  // namespace smokearchive
