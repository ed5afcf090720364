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

#include <doctest.h>

#include <atomic>
#include <mutex>
#include <set>
#include <thread>

#include <map>
#include <random>

#include <fmt/format.h>
#include <httplib.h>

#include "smokearchive/corpusgen.h"
#include "smokearchive/fetcher.h"
#include "smokearchive/fsutil.h"
#include "support.h"

using namespace smokearchive;
using namespace std::chrono;
using smokearchive::testing::small_spec;
using smokearchive::testing::TempDir;
namespace fs = std::filesystem;

namespace {

const Date kMay15 = sys_days{2023y / 5 / 15};

/// Serves a fixed set of available days for any id; counts requests.
class DaySetTransport final : public Transport {
 public:
  DaySetTransport(std::set<std::string> days, std::vector<std::byte> body) : days_(std::move(days)), body_(std::move(body)) {}
  FetchResponse get(const std::string& url) override {
    ++requests;
    FetchResponse r;
    for (const auto& d : days_) {
      if (url.find("/" + d) != std::string::npos) {
        r.status = FetchResponse::Status::ok;
        r.body = body_;
        return r;
      }
    }
    r.status = FetchResponse::Status::not_found;
    return r;
  }
  std::atomic<int> requests{0};

 private:
  std::set<std::string> days_;
  std::vector<std::byte> body_;
};

/// Fails the first `failures` calls per URL with a network error.
class FlakyTransport final : public Transport {
 public:
  FlakyTransport(std::shared_ptr<Transport> inner, int failures) : inner_(std::move(inner)), failures_(failures) {}
  FetchResponse get(const std::string& url) override {
    {
      std::lock_guard lock(mu_);
      if (calls_[url]++ < failures_) {
        FetchResponse r;
        r.error = "connection reset";
        return r;
      }
    }
    return inner_->get(url);
  }

 private:
  std::shared_ptr<Transport> inner_;
  int failures_;
  std::mutex mu_;
  std::map<std::string, int> calls_;
};

std::vector<std::byte> tiny_granule_bytes() {
  ForecastGranule g;
  g.header.forecast_id = "BSC00CA12-01";
  const auto init = Instant{kMay15};
  g.header.smoke_init = g.header.weather_init = g.header.creation = calendar_to_julian(init);
  g.header.geometry = {2, 2, 45, -125, 0.5, 0.5};
  g.header.ntimes = 1;
  g.tflag = {calendar_to_julian(init)};
  g.pm25 = {1, 2, 3, 4};
  return encode_granule(g);
}

FetchOptions fast(std::shared_ptr<Transport> t = nullptr) {
  FetchOptions o;
  o.parallel = 4;
  o.initial_backoff = milliseconds{0};
  o.transport = std::move(t);
  return o;
}

}  // namespace

TEST_CASE("url construction") {
  SourceEndpoint ep{"https://firesmoke.ca/forecasts/"};
  CHECK(build_url(ep, "BSC00CA12-01", kMay15, 0) ==
        "https://firesmoke.ca/forecasts/BSC00CA12-01/2023051500/dispersion.gran");
  CHECK(build_url(ep, "BSC18CA12-01", kMay15, 18) ==
        "https://firesmoke.ca/forecasts/BSC18CA12-01/2023051518/dispersion.gran");
  CHECK(build_url(ep, "OTHER", kMay15, 6) == "https://firesmoke.ca/forecasts/OTHER/2023051506/dispersion.gran");
  CHECK_THROWS_AS(build_url(ep, "BSC00CA12-01", kMay15, 6), ConfigError);
  CHECK_THROWS_AS(build_url(ep, "OTHER", kMay15, 24), ConfigError);
  ep.url_template = "{forecast_id}/{yyyymmdd}/dispersion.{ext}";
  CHECK_THROWS_AS(build_url(ep, "OTHER", kMay15, 0), ConfigError);
  CHECK(fetch_init_hour("BSC12CA12-01") == 12);
}

TEST_CASE("validate_granule_bytes") {
  auto b = tiny_granule_bytes();
  CHECK(validate_granule_bytes(b).empty());
  auto longer = b;
  longer.push_back(std::byte{0});
  CHECK_FALSE(validate_granule_bytes(longer).empty());
  b.pop_back();
  CHECK(validate_granule_bytes(b).find("truncated") != std::string::npos);
  const auto html = html_error_page();
  CHECK(validate_granule_bytes(as_bytes(html)).find("not_a_granule") != std::string::npos);
}

TEST_CASE("file tree fetch sorts faults and never commits bad bytes") {
  TempDir dir;
  auto spec = small_spec(21, 10);
  spec.horizon_hours = 12;
  spec.faults = {0.2, 0.15, 0.15};
  const auto manifest = generate_corpus(spec, dir / "corpus");
  const SourceEndpoint ep{(dir / "corpus").string()};
  const auto cache = dir / "cache";
  const auto report = fetch_range(ep, spec.forecast_ids, spec.start_date, spec.end_date, cache, fast());
  REQUIRE(report.records.size() == manifest.runs.size());
  for (const auto& rec : report.records) {
    const auto* run = manifest.find(rec.forecast_id, Instant{rec.date} + hours{fetch_init_hour(rec.forecast_id)});
    REQUIRE(run);
    CAPTURE(rec.url);
    switch (run->outcome) {
      case RunOutcome::ok:
        CHECK(rec.outcome == FetchOutcome::downloaded);
        CHECK(read_file(cache_path(cache, rec.forecast_id, rec.date)) == read_file(dir / "corpus" / run->path.string()));
        break;
      case RunOutcome::missing: CHECK(rec.outcome == FetchOutcome::not_found); break;
      case RunOutcome::html:
      case RunOutcome::truncated:
        CHECK(rec.outcome == FetchOutcome::invalid_content);
        CHECK(fs::exists(reject_path(cache, rec.forecast_id, rec.date)));
        CHECK_FALSE(fs::exists(cache_path(cache, rec.forecast_id, rec.date)));
        break;
    }
    CHECK(rec.attempts <= 1);
  }
  // Idempotent: valid files are skipped on the second pass.
  const auto again = fetch_range(ep, spec.forecast_ids, spec.start_date, spec.end_date, cache, fast());
  CHECK(again.count(FetchOutcome::skipped) == manifest.count(RunOutcome::ok));
  CHECK(again.count(FetchOutcome::downloaded) == 0);

  write_fetch_report_csv(report, cache / "fetch_report.csv");
  const auto csv = read_text_file(cache / "fetch_report.csv");
  CHECK(csv.rfind("forecast_id,date,outcome,bytes,attempts\n", 0) == 0);
}

TEST_CASE("a corrupted cached file is replaced") {
  TempDir dir;
  auto spec = small_spec(2, 1);
  spec.horizon_hours = 3;
  spec.faults = FaultProfile::none();
  spec.forecast_ids = {"BSC00CA12-01"};
  generate_corpus(spec, dir / "corpus");
  const SourceEndpoint ep{(dir / "corpus").string()};
  const auto target = cache_path(dir / "cache", "BSC00CA12-01", spec.start_date);
  atomic_write_text(target, "junk");
  const auto report = fetch_range(ep, spec.forecast_ids, spec.start_date, spec.end_date, dir / "cache", fast());
  CHECK(report.records.at(0).outcome == FetchOutcome::downloaded);
  CHECK_NOTHROW(parse_granule_file(target));
}

TEST_CASE("retries with backoff") {
  TempDir dir;
  const auto body = tiny_granule_bytes();
  auto base = std::make_shared<DaySetTransport>(std::set<std::string>{"BSC00CA12-01/20230515"}, body);
  const SourceEndpoint ep{"mem://x"};
  const std::vector<std::string> ids{"BSC00CA12-01"};

  auto report = fetch_range(ep, ids, kMay15, kMay15, dir / "a", fast(std::make_shared<FlakyTransport>(base, 2)));
  CHECK(report.records[0].outcome == FetchOutcome::downloaded);
  CHECK(report.records[0].attempts == 3);

  report = fetch_range(ep, ids, kMay15, kMay15, dir / "b", fast(std::make_shared<FlakyTransport>(base, 3)));
  CHECK(report.records[0].outcome == FetchOutcome::io_error);
  CHECK(report.records[0].attempts == 3);
  CHECK(report.records[0].detail == "connection reset");

  auto opts = fast(std::make_shared<FlakyTransport>(base, 1));
  opts.initial_backoff = milliseconds{30};
  const auto t0 = steady_clock::now();
  report = fetch_range(ep, ids, kMay15, kMay15, dir / "c", opts);
  CHECK(steady_clock::now() - t0 >= milliseconds{30});
  CHECK(report.records[0].attempts == 2);
}

TEST_CASE("probe_earliest matches a linear scan with fewer requests") {
  const auto body = tiny_granule_bytes();
  const SourceEndpoint ep{"mem://x"};
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    const long n = 50 + static_cast<long>(rng() % 2000);
    const long earliest = static_cast<long>(rng() % static_cast<unsigned long>(n + 20));
    std::set<std::string> days;
    for (long o = earliest; o < n; ++o) {
      // Gaps of up to 5 days inside the available period, each followed by
      // an available day.
      if (o != earliest && rng() % 10 < 3) o = std::min(n - 1, o + 1 + static_cast<long>(rng() % 5));
      days.insert(fmt::format("BSC00CA12-01/{}", format_compact_date(kMay15 + std::chrono::days{o})));
    }
    std::optional<Date> oracle;
    for (long o = 0; o < n && !oracle; ++o) {
      if (days.contains(fmt::format("BSC00CA12-01/{}", format_compact_date(kMay15 + std::chrono::days{o})))) {
        oracle = kMay15 + std::chrono::days{o};
      }
    }
    auto transport = std::make_shared<DaySetTransport>(days, body);
    ProbeOptions po;
    po.gap_tolerance_days = 6;
    po.transport = transport;
    const auto r = probe_earliest(ep, "BSC00CA12-01", kMay15, kMay15 + std::chrono::days{n - 1}, po);
    CAPTURE(n);
    CAPTURE(earliest);
    CHECK(r.earliest == oracle);
    CHECK(r.requests == transport->requests.load());
    if (n > 1000 && oracle) CHECK(r.requests < n / 4);
  }
}

TEST_CASE("HTTP transport against a local server") {
  TempDir dir;
  auto spec = small_spec(4, 3);
  spec.horizon_hours = 6;
  spec.faults = FaultProfile::none();
  spec.forecast_ids = {"BSC00CA12-01", "BSC12CA12-01"};
  generate_corpus(spec, dir / "corpus");
  fs::remove_all(dir / "corpus/BSC12CA12-01" / (format_compact_date(spec.start_date) + "12"));

  httplib::Server server;
  REQUIRE(server.set_mount_point("/forecasts", (dir / "corpus").string()));
  server.Get("/moved/(.*)", [](const httplib::Request& req, httplib::Response& res) {
    res.set_redirect("/forecasts/" + req.matches[1].str());
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread worker([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  const auto base = fmt::format("http://127.0.0.1:{}/forecasts", port);
  const auto report = fetch_range(SourceEndpoint{base}, spec.forecast_ids, spec.start_date, spec.end_date,
                                  dir / "cache", fast());
  CHECK(report.count(FetchOutcome::downloaded) == 5);
  CHECK(report.count(FetchOutcome::not_found) == 1);
  CHECK(report.bytes_transferred() > 0);

  HttpTransport http;
  const auto moved = http.get(fmt::format("http://127.0.0.1:{}/moved/BSC00CA12-01/{}00/dispersion.gran", port,
                                          format_compact_date(spec.start_date)));
  CHECK(moved.status == FetchResponse::Status::ok);
  const auto refused = HttpTransport(seconds{1}).get("http://127.0.0.1:1/x");
  CHECK(refused.status == FetchResponse::Status::network_error);

  server.stop();
  worker.join();
}
