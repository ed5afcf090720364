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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smokearchive/timecal.h"

namespace smokearchive {

/// Portal location. The template is joined to `base` with a single '/'.
struct SourceEndpoint {
  std::string base;
  std::string url_template = "{forecast_id}/{yyyymmdd}{init}/dispersion.{ext}";
  std::string ext = "gran";

  /// Throws ConfigError unless every placeholder appears exactly once.
  void validate() const;
};

/// Throws ConfigError when the id names an init hour different from
/// `init_hour`.
std::string build_url(const SourceEndpoint& endpoint, std::string_view forecast_id, Date date, int init_hour);

/// Init hour used to fetch an id's daily run (the hour it names, else 0).
int fetch_init_hour(std::string_view forecast_id);

// ---- transport -------------------------------------------------------------

struct FetchResponse {
  enum class Status { ok, not_found, network_error };
  Status status = Status::network_error;
  std::vector<std::byte> body;
  std::string error;
};

class Transport {
 public:
  virtual ~Transport() = default;
  /// Must be safe to call concurrently.
  virtual FetchResponse get(const std::string& url) = 0;
};

/// Local directory tree, addressed by plain paths or file:// URLs.
class FileTreeTransport final : public Transport {
 public:
  FetchResponse get(const std::string& url) override;
};

/// Plain HTTP GET (https when built with TLS support).
class HttpTransport final : public Transport {
 public:
  explicit HttpTransport(std::chrono::seconds timeout = std::chrono::seconds{30}) : timeout_(timeout) {}
  FetchResponse get(const std::string& url) override;

 private:
  std::chrono::seconds timeout_;
};

/// Picks a transport for an endpoint base.
std::unique_ptr<Transport> make_transport(const std::string& base);

// ---- fetching --------------------------------------------------------------

enum class FetchOutcome { downloaded, skipped, not_found, invalid_content, io_error };

std::string_view to_string(FetchOutcome outcome);

struct FetchRecord {
  std::string forecast_id;
  Date date{};
  std::string url;
  FetchOutcome outcome = FetchOutcome::io_error;
  std::uint64_t bytes = 0;
  int attempts = 0;
  std::string detail;
};

struct FetchReport {
  std::vector<FetchRecord> records;  // sorted by (forecast_id, date)

  std::size_t count(FetchOutcome outcome) const;
  std::uint64_t bytes_transferred() const;
};

struct FetchOptions {
  int parallel = 8;
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{1000};
  /// Defaults to make_transport(endpoint.base).
  std::shared_ptr<Transport> transport;
};

/// Cache path for one id/day: cache_root/{id}/dispersion_{YYYYMMDD}.gran.
std::filesystem::path cache_path(const std::filesystem::path& cache_root, std::string_view forecast_id, Date date);
/// Quarantine path: cache_root/rejects/{id}/dispersion_{YYYYMMDD}.gran.
std::filesystem::path reject_path(const std::filesystem::path& cache_root, std::string_view forecast_id, Date date);

/// Empty string when `bytes` is a complete granule, else the reason.
std::string validate_granule_bytes(std::span<const std::byte> bytes);

/// Downloads every (id, day) in [start, end] into the cache. Bodies are
/// validated before commit; invalid ones go to rejects/. Valid cached files
/// are skipped. Network failures are recorded, cache write failures throw.
FetchReport fetch_range(const SourceEndpoint& endpoint, const std::vector<std::string>& forecast_ids, Date start,
                        Date end, const std::filesystem::path& cache_root, const FetchOptions& options = {});

void write_fetch_report_csv(const FetchReport& report, const std::filesystem::path& path);

struct ProbeResult {
  std::optional<Date> earliest;
  int requests = 0;
};

struct ProbeOptions {
  /// Longest run of consecutive missing days tolerated inside the
  /// available period.
  int gap_tolerance_days = 14;
  std::shared_ptr<Transport> transport;
};

/// Earliest date in [first, last] whose URL yields a valid granule.
ProbeResult probe_earliest(const SourceEndpoint& endpoint, std::string_view forecast_id, Date first, Date last,
                           const ProbeOptions& options = {});

}  // namespace smokearchive
