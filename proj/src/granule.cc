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

#include "smokearchive/granule.h"

#include <bit>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <ostream>
#include <sstream>

#include <fcntl.h>
#include <fmt/format.h>
#include <unistd.h>

#include "smokearchive/fsutil.h"

namespace smokearchive {

namespace {

// Field offsets in the fixed-size header.
constexpr std::uint64_t kOffVersion = 8;
constexpr std::uint64_t kOffForecastId = 12;
constexpr std::uint64_t kOffStamps = 28;  // cdate ctime wdate wtime sdate stime
constexpr std::uint64_t kOffDims = 52;    // nrows ncols ntimes
constexpr std::uint64_t kOffGeometry = 64;  // lat0 lon0 dlat dlon

// Upper bounds that keep a garbage header from requesting absurd buffers.
constexpr std::uint32_t kMaxDim = 1u << 16;
constexpr std::uint32_t kMaxTimes = 1u << 14;
constexpr std::size_t kPayloadChunkFloats = 1u << 18;

static_assert(kOffGeometry + 32 == kGranuleHeaderBytes);

void put_u32(std::vector<std::byte>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFFu));
}

void put_u64(std::vector<std::byte>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFFu));
}

void put_f64(std::vector<std::byte>& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint32_t get_u32(const std::byte* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | std::to_integer<std::uint32_t>(p[i]);
  return v;
}

std::uint64_t get_u64(const std::byte* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | std::to_integer<std::uint64_t>(p[i]);
  return v;
}

double get_f64(const std::byte* p) { return std::bit_cast<double>(get_u64(p)); }

[[noreturn]] void fail(GranuleErrorKind kind, std::uint64_t offset, const std::string& detail) {
  throw GranuleError(kind, offset, detail);
}

/// Reads exactly `out.size()` bytes or throws Truncated at the first missing
/// byte.
void read_exact(ByteSource& src, std::span<std::byte> out, std::uint64_t offset, std::string_view what) {
  std::size_t got = 0;
  while (got < out.size()) {
    const auto n = src.read(out.subspan(got));
    if (n == 0) break;
    got += n;
  }
  if (got != out.size()) {
    fail(GranuleErrorKind::truncated, offset + got,
         fmt::format("stream ends inside {} ({} of {} bytes)", what, got, out.size()));
  }
}

bool valid_forecast_id(std::string_view id) {
  if (id.empty()) return false;
  for (char c : id) {
    if (c <= ' ' || c > '~') return false;
  }
  return true;
}

void check_stamp(JulianStamp s, std::uint64_t offset, std::string_view name) {
  if (!is_valid(s)) {
    fail(GranuleErrorKind::invalid_header, offset,
         fmt::format("{} ({}, {:06}) is not a valid YYYYDDD/HHMMSS stamp", name, s.date, s.time));
  }
}

void check_header(const GranuleHeader& h) {
  if (!valid_forecast_id(h.forecast_id) || h.forecast_id.size() > kForecastIdWidth) {
    fail(GranuleErrorKind::invalid_header, kOffForecastId, fmt::format("bad forecast id '{}'", h.forecast_id));
  }
  check_stamp(h.creation, kOffStamps, "CDATE/CTIME");
  check_stamp(h.weather_init, kOffStamps + 8, "WDATE/WTIME");
  check_stamp(h.smoke_init, kOffStamps + 16, "SDATE/STIME");
  const auto& g = h.geometry;
  if (g.nrows < 2 || g.nrows > kMaxDim) {
    fail(GranuleErrorKind::invalid_header, kOffDims, fmt::format("nrows {} out of range", g.nrows));
  }
  if (g.ncols < 2 || g.ncols > kMaxDim) {
    fail(GranuleErrorKind::invalid_header, kOffDims + 4, fmt::format("ncols {} out of range", g.ncols));
  }
  if (h.ntimes < 1 || h.ntimes > kMaxTimes) {
    fail(GranuleErrorKind::invalid_header, kOffDims + 8, fmt::format("ntimes {} out of range", h.ntimes));
  }
  try {
    g.validate();
  } catch (const GeometryError& e) {
    fail(GranuleErrorKind::invalid_header, kOffGeometry, e.what());
  }
}

void check_tflag(std::span<const JulianStamp> tflag) {
  Instant prev{};
  for (std::size_t i = 0; i < tflag.size(); ++i) {
    const auto offset = kGranuleHeaderBytes + i * kTflagEntryBytes;
    check_stamp(tflag[i], offset, fmt::format("TFLAG[{}]", i));
    const auto t = julian_to_calendar(tflag[i]);
    if (i > 0 && t - prev != std::chrono::hours{1}) {
      fail(GranuleErrorKind::invalid_header, offset,
           fmt::format("TFLAG[{}] = {} does not follow TFLAG[{}] by one hour", i, format_iso(t), i - 1));
    }
    if (t != std::chrono::floor<std::chrono::hours>(t)) {
      fail(GranuleErrorKind::invalid_header, offset, fmt::format("TFLAG[{}] not on an hour boundary", i));
    }
    prev = t;
  }
}

void check_payload(std::span<const float> values, std::uint64_t base_offset) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    const float v = values[i];
    if (!std::isfinite(v) || v < 0.0f) {
      fail(GranuleErrorKind::invalid_payload, base_offset + i * sizeof(float),
           fmt::format("PM2.5 value {} at element {} is negative or non-finite", v, i));
    }
  }
}

HeaderRead decode_metadata(ByteSource& src) {
  std::byte fixed[kGranuleHeaderBytes];
  std::size_t got = 0;
  while (got < sizeof(fixed)) {
    const auto n = src.read(std::span<std::byte>(fixed + got, sizeof(fixed) - got));
    if (n == 0) break;
    got += n;
  }
  // Magic first, so HTML or garbage is reported as such even when short.
  for (std::size_t i = 0; i < sizeof(kGranuleMagic); ++i) {
    if (i >= got) {
      fail(GranuleErrorKind::truncated, got, fmt::format("stream ends inside magic ({} bytes)", got));
    }
    if (fixed[i] != static_cast<std::byte>(kGranuleMagic[i])) {
      fail(GranuleErrorKind::not_a_granule, i, "magic mismatch: not a SMOKGRAN granule");
    }
  }
  if (got < sizeof(fixed)) {
    fail(GranuleErrorKind::truncated, got, fmt::format("stream ends inside header ({} bytes)", got));
  }
  const auto version = get_u32(fixed + kOffVersion);
  if (version != kGranuleVersion) {
    fail(GranuleErrorKind::invalid_header, kOffVersion, fmt::format("unsupported version {}", version));
  }

  HeaderRead out;
  auto& h = out.header;
  std::string id(reinterpret_cast<const char*>(fixed + kOffForecastId), kForecastIdWidth);
  while (!id.empty() && id.back() == ' ') id.pop_back();
  h.forecast_id = std::move(id);
  const std::byte* s = fixed + kOffStamps;
  h.creation = {get_u32(s), get_u32(s + 4)};
  h.weather_init = {get_u32(s + 8), get_u32(s + 12)};
  h.smoke_init = {get_u32(s + 16), get_u32(s + 20)};
  h.geometry.nrows = get_u32(fixed + kOffDims);
  h.geometry.ncols = get_u32(fixed + kOffDims + 4);
  h.ntimes = get_u32(fixed + kOffDims + 8);
  h.geometry.lat0 = get_f64(fixed + kOffGeometry);
  h.geometry.lon0 = get_f64(fixed + kOffGeometry + 8);
  h.geometry.dlat = get_f64(fixed + kOffGeometry + 16);
  h.geometry.dlon = get_f64(fixed + kOffGeometry + 24);
  check_header(h);

  std::vector<std::byte> raw(std::size_t{h.ntimes} * kTflagEntryBytes);
  read_exact(src, raw, kGranuleHeaderBytes, "TFLAG");
  out.tflag.resize(h.ntimes);
  for (std::size_t i = 0; i < h.ntimes; ++i) {
    out.tflag[i] = {get_u32(raw.data() + i * 8), get_u32(raw.data() + i * 8 + 4)};
  }
  check_tflag(out.tflag);
  return out;
}

}  // namespace

// ---- geometry --------------------------------------------------------------

void GridGeometry::validate() const {
  if (nrows < 2 || ncols < 2) {
    throw GeometryError(fmt::format("grid {}x{} is degenerate (need at least 2x2)", nrows, ncols));
  }
  if (!std::isfinite(dlat) || !std::isfinite(dlon) || dlat <= 0.0 || dlon <= 0.0) {
    throw GeometryError(fmt::format("grid spacing ({}, {}) must be positive", dlat, dlon));
  }
  if (!std::isfinite(lat0) || lat0 < -90.0 || lat_max() > 90.0) {
    throw GeometryError(fmt::format("latitude span [{}, {}] outside [-90, 90]", lat0, lat_max()));
  }
  if (!std::isfinite(lon0) || lon0 < -180.0 || lon0 >= 180.0) {
    throw GeometryError(fmt::format("origin longitude {} outside [-180, 180)", lon0));
  }
}

bool operator==(const GridGeometry& a, const GridGeometry& b) noexcept {
  return a.nrows == b.nrows && a.ncols == b.ncols &&
         std::bit_cast<std::uint64_t>(a.lat0) == std::bit_cast<std::uint64_t>(b.lat0) &&
         std::bit_cast<std::uint64_t>(a.lon0) == std::bit_cast<std::uint64_t>(b.lon0) &&
         std::bit_cast<std::uint64_t>(a.dlat) == std::bit_cast<std::uint64_t>(b.dlat) &&
         std::bit_cast<std::uint64_t>(a.dlon) == std::bit_cast<std::uint64_t>(b.dlon);
}

std::string describe(const GridGeometry& g) {
  return fmt::format("{}x{} @ ({}, {}) step ({}, {})", g.nrows, g.ncols, g.lat0, g.lon0, g.dlat, g.dlon);
}

LatLon grid_coordinates(const GridGeometry& geom, std::size_t row, std::size_t col) {
  if (row >= geom.nrows || col >= geom.ncols) {
    throw RangeError("granule", fmt::format("grid index ({}, {}) outside {}x{}", row, col, geom.nrows, geom.ncols));
  }
  return {geom.lat0 + static_cast<double>(row) * geom.dlat, geom.lon0 + static_cast<double>(col) * geom.dlon};
}

// ---- errors ----------------------------------------------------------------

std::string_view to_string(GranuleErrorKind kind) {
  switch (kind) {
    case GranuleErrorKind::not_a_granule: return "not_a_granule";
    case GranuleErrorKind::truncated: return "truncated";
    case GranuleErrorKind::invalid_header: return "invalid_header";
    case GranuleErrorKind::invalid_payload: return "invalid_payload";
  }
  return "unknown";
}

GranuleError::GranuleError(GranuleErrorKind kind, std::uint64_t offset, const std::string& detail)
    : Error("granule", fmt::format("{} at byte {}: {}", to_string(kind), offset, detail)),
      kind_(kind),
      offset_(offset) {}

// ---- sources ---------------------------------------------------------------

std::size_t MemorySource::read(std::span<std::byte> out) {
  const auto n = std::min(out.size(), bytes_.size() - pos_);
  std::memcpy(out.data(), bytes_.data() + pos_, n);
  pos_ += n;
  return n;
}

FileSource::FileSource(const std::filesystem::path& path) : fd_(::open(path.c_str(), O_RDONLY | O_CLOEXEC)) {
  if (fd_ < 0) throw IoError("granule", fmt::format("cannot open {}: {}", path.string(), std::strerror(errno)));
}

FileSource::~FileSource() {
  if (fd_ >= 0) ::close(fd_);
}

std::size_t FileSource::read(std::span<std::byte> out) {
  std::size_t got = 0;
  while (got < out.size()) {
    const auto n = ::read(fd_, out.data() + got, out.size() - got);
    if (n < 0 && errno == EINTR) continue;
    if (n < 0) throw IoError("granule", fmt::format("read failed: {}", std::strerror(errno)));
    if (n == 0) break;
    got += static_cast<std::size_t>(n);
  }
  return got;
}

// ---- write -----------------------------------------------------------------

void validate(const ForecastGranule& g) {
  check_header(g.header);
  if (g.tflag.size() != g.header.ntimes) {
    fail(GranuleErrorKind::invalid_header, kOffDims + 8,
         fmt::format("{} TFLAG entries for ntimes = {}", g.tflag.size(), g.header.ntimes));
  }
  check_tflag(g.tflag);
  const auto expected = std::size_t{g.header.ntimes} * g.header.geometry.cells();
  if (g.pm25.size() != expected) {
    fail(GranuleErrorKind::invalid_payload, metadata_bytes(g.header.ntimes),
         fmt::format("{} PM2.5 values for {} expected", g.pm25.size(), expected));
  }
  check_payload(g.pm25, metadata_bytes(g.header.ntimes));
}

std::vector<std::byte> encode_granule(const ForecastGranule& g) {
  validate(g);
  const auto& h = g.header;
  std::vector<std::byte> out;
  out.reserve(metadata_bytes(h.ntimes) + g.pm25.size() * sizeof(float));
  for (char c : kGranuleMagic) out.push_back(static_cast<std::byte>(c));
  put_u32(out, kGranuleVersion);
  for (std::size_t i = 0; i < kForecastIdWidth; ++i) {
    out.push_back(static_cast<std::byte>(i < h.forecast_id.size() ? h.forecast_id[i] : ' '));
  }
  for (auto s : {h.creation, h.weather_init, h.smoke_init}) {
    put_u32(out, s.date);
    put_u32(out, s.time);
  }
  put_u32(out, h.geometry.nrows);
  put_u32(out, h.geometry.ncols);
  put_u32(out, h.ntimes);
  put_f64(out, h.geometry.lat0);
  put_f64(out, h.geometry.lon0);
  put_f64(out, h.geometry.dlat);
  put_f64(out, h.geometry.dlon);
  for (auto s : g.tflag) {
    put_u32(out, s.date);
    put_u32(out, s.time);
  }
  for (float v : g.pm25) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

std::uint64_t write_granule(const ForecastGranule& g, std::ostream& out) {
  const auto bytes = encode_granule(g);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("granule", "granule write failed");
  return bytes.size();
}

void write_granule_file(const ForecastGranule& g, const std::filesystem::path& path) {
  atomic_write(path, encode_granule(g));
}

// ---- read ------------------------------------------------------------------

HeaderRead read_header(ByteSource& source) { return decode_metadata(source); }

HeaderRead read_header(std::span<const std::byte> bytes) {
  MemorySource src(bytes);
  return decode_metadata(src);
}

ForecastGranule parse_granule(ByteSource& source) {
  auto meta = decode_metadata(source);
  ForecastGranule g;
  g.header = std::move(meta.header);
  g.tflag = std::move(meta.tflag);

  const std::size_t total = std::size_t{g.header.ntimes} * g.header.geometry.cells();
  const std::uint64_t base = metadata_bytes(g.header.ntimes);
  std::vector<std::byte> raw;
  // Grow in chunks so a lying header on a short stream fails before a large
  // allocation.
  std::size_t done = 0;
  while (done < total) {
    const auto n = std::min(kPayloadChunkFloats, total - done);
    raw.resize(n * sizeof(float));
    read_exact(source, raw, base + done * sizeof(float), "payload");
    g.pm25.resize(done + n);
    if constexpr (std::endian::native == std::endian::little) {
      std::memcpy(g.pm25.data() + done, raw.data(), raw.size());
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        g.pm25[done + i] = std::bit_cast<float>(get_u32(raw.data() + i * 4));
      }
    }
    check_payload(std::span<const float>(g.pm25).subspan(done, n), base + done * sizeof(float));
    done += n;
  }
  return g;
}

ForecastGranule parse_granule(std::span<const std::byte> bytes) {
  MemorySource src(bytes);
  return parse_granule(src);
}

ForecastGranule parse_granule_file(const std::filesystem::path& path) {
  FileSource src(path);
  return parse_granule(src);
}

}  // namespace smokearchive
