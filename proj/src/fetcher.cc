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

#include "smokearchive/fetcher.h"

#include <algorithm>
#include <map>
#include <thread>

#include <fmt/format.h>

#include "parallel.h"
#include "smokearchive/corpusgen.h"
#include "smokearchive/error.h"
#include "smokearchive/fsutil.h"
#include "smokearchive/granule.h"

namespace smokearchive {

namespace fs = std::filesystem;
using namespace std::chrono;

namespace {

constexpr std::string_view kPlaceholders[] = {"{forecast_id}", "{yyyymmdd}", "{init}", "{ext}"};

std::size_t count_occurrences(std::string_view text, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string_view::npos; pos = text.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

void replace_once(std::string& text, std::string_view needle, std::string_view value) {
  const auto pos = text.find(needle);
  text.replace(pos, needle.size(), value);
}

bool cached_file_valid(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) return false;
  try {
    FileSource src(path);
    const auto meta = read_header(src);
    return fs::file_size(path, ec) == meta.expected_total_bytes() && !ec;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

void SourceEndpoint::validate() const {
  if (base.empty()) throw ConfigError("fetcher", "endpoint base is empty");
  for (auto p : kPlaceholders) {
    const auto n = count_occurrences(url_template, p);
    if (n != 1) {
      throw ConfigError("fetcher", fmt::format("url template '{}' must contain {} exactly once (found {})",
                                               url_template, p, n));
    }
  }
}

int fetch_init_hour(std::string_view forecast_id) { return init_hour_of(forecast_id).value_or(0); }

std::string build_url(const SourceEndpoint& endpoint, std::string_view forecast_id, Date date, int init_hour) {
  endpoint.validate();
  if (init_hour < 0 || init_hour > 23) {
    throw ConfigError("fetcher", fmt::format("init hour {} outside [0, 24)", init_hour));
  }
  if (const auto own = init_hour_of(forecast_id); own && *own != init_hour) {
    throw ConfigError("fetcher", fmt::format("forecast id {} is initialized at {:02} UTC, not {:02}", forecast_id,
                                             *own, init_hour));
  }
  std::string path = endpoint.url_template;
  replace_once(path, "{forecast_id}", forecast_id);
  replace_once(path, "{yyyymmdd}", format_compact_date(date));
  replace_once(path, "{init}", fmt::format("{:02}", init_hour));
  replace_once(path, "{ext}", endpoint.ext);
  std::string base = endpoint.base;
  while (!base.empty() && base.back() == '/') base.pop_back();
  while (!path.empty() && path.front() == '/') path.erase(path.begin());
  return base + "/" + path;
}

std::string_view to_string(FetchOutcome outcome) {
  switch (outcome) {
    case FetchOutcome::downloaded: return "downloaded";
    case FetchOutcome::skipped: return "skipped";
    case FetchOutcome::not_found: return "not_found";
    case FetchOutcome::invalid_content: return "invalid_content";
    case FetchOutcome::io_error: return "io_error";
  }
  return "unknown";
}

std::size_t FetchReport::count(FetchOutcome outcome) const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [&](const FetchRecord& r) { return r.outcome == outcome; }));
}

std::uint64_t FetchReport::bytes_transferred() const {
  std::uint64_t total = 0;
  for (const auto& r : records) total += r.bytes;
  return total;
}

fs::path cache_path(const fs::path& cache_root, std::string_view forecast_id, Date date) {
  return cache_root / std::string(forecast_id) / fmt::format("dispersion_{}.gran", format_compact_date(date));
}

fs::path reject_path(const fs::path& cache_root, std::string_view forecast_id, Date date) {
  return cache_root / "rejects" / std::string(forecast_id) /
         fmt::format("dispersion_{}.gran", format_compact_date(date));
}

std::string validate_granule_bytes(std::span<const std::byte> bytes) {
  try {
    const auto meta = read_header(bytes);
    const auto expected = meta.expected_total_bytes();
    if (bytes.size() < expected) {
      return fmt::format("truncated: {} of {} bytes", bytes.size(), expected);
    }
    if (bytes.size() > expected) {
      return fmt::format("{} trailing bytes after payload", bytes.size() - expected);
    }
    return {};
  } catch (const GranuleError& e) {
    return e.what();
  }
}

FetchReport fetch_range(const SourceEndpoint& endpoint, const std::vector<std::string>& forecast_ids, Date start,
                        Date end, const fs::path& cache_root, const FetchOptions& options) {
  endpoint.validate();
  if (start > end) {
    throw RangeError("fetcher", fmt::format("fetch range {} .. {} is empty", format_date(start), format_date(end)));
  }
  std::shared_ptr<Transport> transport = options.transport;
  if (!transport) transport = make_transport(endpoint.base);

  FetchReport report;
  for (const auto& id : forecast_ids) {
    for (auto d = start; d <= end; d += days{1}) {
      FetchRecord rec;
      rec.forecast_id = id;
      rec.date = d;
      rec.url = build_url(endpoint, id, d, fetch_init_hour(id));
      report.records.push_back(std::move(rec));
    }
  }
  std::sort(report.records.begin(), report.records.end(), [](const FetchRecord& a, const FetchRecord& b) {
    return std::tie(a.forecast_id, a.date) < std::tie(b.forecast_id, b.date);
  });

  detail::parallel_for(report.records.size(), options.parallel, [&](std::size_t i) {
    auto& rec = report.records[i];
    const auto target = cache_path(cache_root, rec.forecast_id, rec.date);
    if (cached_file_valid(target)) {
      rec.outcome = FetchOutcome::skipped;
      return;
    }
    auto backoff = options.initial_backoff;
    while (true) {
      ++rec.attempts;
      auto resp = transport->get(rec.url);
      if (resp.status == FetchResponse::Status::not_found) {
        rec.outcome = FetchOutcome::not_found;
        return;
      }
      if (resp.status == FetchResponse::Status::network_error) {
        rec.detail = resp.error;
        if (rec.attempts >= options.max_attempts) {
          rec.outcome = FetchOutcome::io_error;
          return;
        }
        std::this_thread::sleep_for(backoff);
        backoff *= 2;
        continue;
      }
      rec.bytes = resp.body.size();
      if (auto reason = validate_granule_bytes(resp.body); !reason.empty()) {
        rec.outcome = FetchOutcome::invalid_content;
        rec.detail = std::move(reason);
        atomic_write(reject_path(cache_root, rec.forecast_id, rec.date), resp.body);
        return;
      }
      atomic_write(target, resp.body);
      rec.outcome = FetchOutcome::downloaded;
      return;
    }
  });
  return report;
}

void write_fetch_report_csv(const FetchReport& report, const fs::path& path) {
  std::string out = "forecast_id,date,outcome,bytes,attempts\n";
  for (const auto& r : report.records) {
    out += fmt::format("{},{},{},{},{}\n", r.forecast_id, format_date(r.date), to_string(r.outcome), r.bytes,
                       r.attempts);
  }
  atomic_write_text(path, out);
}

ProbeResult probe_earliest(const SourceEndpoint& endpoint, std::string_view forecast_id, Date first, Date last,
                           const ProbeOptions& options) {
  endpoint.validate();
  if (first > last) throw RangeError("fetcher", "probe window is empty");
  std::shared_ptr<Transport> transport = options.transport;
  if (!transport) transport = make_transport(endpoint.base);
  const int hour = fetch_init_hour(forecast_id);
  const long n = (last - first).count() + 1;
  const long tolerance = std::max(1, options.gap_tolerance_days);

  ProbeResult result;
  std::map<long, bool> seen;
  auto available = [&](long offset) {
    if (auto it = seen.find(offset); it != seen.end()) return it->second;
    ++result.requests;
    const auto resp = transport->get(build_url(endpoint, forecast_id, first + days{offset}, hour));
    const bool ok = resp.status == FetchResponse::Status::ok && validate_granule_bytes(resp.body).empty();
    seen[offset] = ok;
    return ok;
  };

  // Gallop from the window start: offsets 0, 1, 2, 4, 8, ...
  std::optional<long> hit;
  for (long off = 0; off < n; off = off == 0 ? 1 : off * 2) {
    if (available(off)) {
      hit = off;
      break;
    }
  }
  // No hit: sweep the window at the gap tolerance stride.
  if (!hit) {
    for (long off = 0; off < n; off += tolerance) {
      if (available(off)) {
        hit = off;
        break;
      }
    }
    if (!hit && available(n - 1)) {
      hit = n - 1;
    }
  }
  if (!hit) return result;

  // A single miss before `hit` may be a gap inside the available period, so
  // it does not bound the earliest date. "Some available day in
  // [d, d + tolerance)" is monotone in d as long as gaps stay below the
  // tolerance: binary search for the smallest such d, then walk forward.
  auto any_within = [&](long d) {
    for (long o = d; o < std::min(d + tolerance, *hit + 1); ++o) {
      if (available(o)) return true;
    }
    return false;
  };
  long lo = 0, hi = *hit;
  while (lo < hi) {
    const long mid = lo + (hi - lo) / 2;
    if (any_within(mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  for (long o = lo; o <= *hit; ++o) {
    if (available(o)) {
      result.earliest = first + days{o};
      break;
    }
  }
  return result;
}

}  // namespace smokearchive
