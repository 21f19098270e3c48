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

#ifndef PRETEXT_SIDECAR_CLIENT_H_
#define PRETEXT_SIDECAR_CLIENT_H_

#include <optional>
#include <string>

#include "json.hpp"

namespace pretext {

inline constexpr char kSidecarUrlEnv[] = "PRETEXT_SIDECAR_URL";

// PRETEXT_SIDECAR_URL, when set, wins over the configured URL. Throws
// ConfigError when neither is available.
std::string ResolveSidecarUrl(const std::optional<std::string>& configured);

// Minimal JSON-over-HTTP client for the model sidecar.
class SidecarClient {
 public:
  // `base_url` is "http://host:port" with an optional path prefix.
  explicit SidecarClient(std::string base_url);

  // POSTs `body` to `path`. Connection failures raise TransportError;
  // non-200 statuses and non-JSON bodies raise ProtocolError.
  nlohmann::json Post(const std::string& path,
                      const nlohmann::json& body) const;

 private:
  std::string scheme_host_port_;
  std::string prefix_;
};

}  // namespace pretext

#endif  // PRETEXT_SIDECAR_CLIENT_H_
