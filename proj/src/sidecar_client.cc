// Copyright 2026 The pretext Authors
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

#include "pretext/sidecar_client.h"

#include <cstdlib>

#include "httplib.h"
#include "pretext/error.h"

namespace pretext {

std::string ResolveSidecarUrl(const std::optional<std::string>& configured) {
  if (const char* env = std::getenv(kSidecarUrlEnv); env && *env) return env;
  if (configured && !configured->empty()) return *configured;
  throw ConfigError(std::string("remote provider selected but no URL given; "
                                "set remote_url or ") +
                    kSidecarUrlEnv);
}

SidecarClient::SidecarClient(std::string base_url) {
  std::size_t scheme_end = base_url.find("://");
  std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  std::size_t path_start = base_url.find('/', host_start);
  if (path_start == std::string::npos) {
    scheme_host_port_ = base_url;
  } else {
    scheme_host_port_ = base_url.substr(0, path_start);
    prefix_ = base_url.substr(path_start);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  }
}

nlohmann::json SidecarClient::Post(const std::string& path,
                                   const nlohmann::json& body) const {
  httplib::Client client(scheme_host_port_);
  client.set_connection_timeout(5);
  client.set_read_timeout(600);
  const std::string url = prefix_ + path;
  auto res = client.Post(url, body.dump(), "application/json");
  if (!res) {
    throw TransportError("sidecar " + scheme_host_port_ + url +
                         " unreachable: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw ProtocolError("sidecar " + url + " returned HTTP " +
                        std::to_string(res->status) + ": " + res->body);
  }
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error& e) {
    throw ProtocolError("sidecar " + url + " returned invalid JSON: " +
                        e.what());
  }
}

}  // namespace pretext
