/*
 * Copyright 2026 The cfaudit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cfaudit/backends/factory.h"

#include <charconv>

#include "cfaudit/backends/oracle_backend.h"
#include "cfaudit/backends/remote_backend.h"
#include "cfaudit/core/errors.h"

namespace cfaudit {

std::unique_ptr<Backend> OpenBackend(const std::string& locator) {
  const auto colon = locator.find(':');
  if (colon == std::string::npos) {
    throw InputError("backend locator '" + locator +
                     "' must look like oracle:PATH, tcp:HOST:PORT or "
                     "stdio:COMMAND");
  }
  const std::string kind = locator.substr(0, colon);
  const std::string rest = locator.substr(colon + 1);
  if (kind == "oracle") {
    return std::make_unique<OracleBackend>(SyntheticOracleSpec::Load(rest));
  }
  if (kind == "tcp") {
    const auto port_sep = rest.rfind(':');
    if (port_sep == std::string::npos) {
      throw InputError("tcp backend needs HOST:PORT, got '" + rest + "'");
    }
    const std::string host = rest.substr(0, port_sep);
    const std::string port_text = rest.substr(port_sep + 1);
    int port = 0;
    auto [ptr, ec] = std::from_chars(port_text.data(),
                                     port_text.data() + port_text.size(), port);
    if (ec != std::errc() || ptr != port_text.data() + port_text.size() ||
        port <= 0 || port > 65535) {
      throw InputError("invalid tcp port '" + port_text + "'");
    }
    return std::make_unique<RemoteBackend>(
        [host, port] { return ConnectTcp(host, port); });
  }
  if (kind == "stdio") {
    if (rest.empty()) throw InputError("stdio backend needs a command");
    return std::make_unique<RemoteBackend>(
        [rest] { return std::make_unique<ChildProcessChannel>(rest); });
  }
  throw InputError("unknown backend kind '" + kind + "'");
}

}  // namespace cfaudit
