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

#include <fstream>
#include <system_error>

#include <fmt/format.h>
#include <httplib.h>

#include "smokearchive/fetcher.h"

namespace smokearchive {

namespace fs = std::filesystem;

namespace {

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

}  // namespace

FetchResponse FileTreeTransport::get(const std::string& url) {
  std::string_view p = url;
  if (starts_with(p, "file://")) p.remove_prefix(7);
  const fs::path path{std::string(p)};
  FetchResponse resp;
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    resp.status = FetchResponse::Status::not_found;
    return resp;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    resp.status = FetchResponse::Status::network_error;
    resp.error = fmt::format("cannot open {}", path.string());
    return resp;
  }
  in.seekg(0, std::ios::end);
  resp.body.resize(static_cast<std::size_t>(in.tellg()));
  in.seekg(0);
  in.read(reinterpret_cast<char*>(resp.body.data()), static_cast<std::streamsize>(resp.body.size()));
  if (!in) {
    resp.status = FetchResponse::Status::network_error;
    resp.error = fmt::format("short read on {}", path.string());
    resp.body.clear();
    return resp;
  }
  resp.status = FetchResponse::Status::ok;
  return resp;
}

FetchResponse HttpTransport::get(const std::string& url) {
  FetchResponse resp;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    resp.error = fmt::format("not an http(s) URL: {}", url);
    return resp;
  }
  const auto path_start = url.find('/', scheme_end + 3);
  const std::string origin = url.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

  httplib::Client client(origin);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_follow_location(true);
  auto result = client.Get(path);
  if (!result) {
    resp.error = fmt::format("{}: {}", url, httplib::to_string(result.error()));
    return resp;
  }
  if (result->status == 404 || result->status == 410) {
    resp.status = FetchResponse::Status::not_found;
    return resp;
  }
  if (result->status != 200) {
    resp.error = fmt::format("{}: HTTP {}", url, result->status);
    return resp;
  }
  resp.status = FetchResponse::Status::ok;
  const auto& body = result->body;
  resp.body.assign(reinterpret_cast<const std::byte*>(body.data()),
                   reinterpret_cast<const std::byte*>(body.data()) + body.size());
  return resp;
}

std::unique_ptr<Transport> make_transport(const std::string& base) {
  if (starts_with(base, "http://") || starts_with(base, "https://")) return std::make_unique<HttpTransport>();
  return std::make_unique<FileTreeTransport>();
}

}  // namespace smokearchive
