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

// Test model server: serves an oracle spec (or an identity model) over the
// wire protocol on stdin/stdout.
//
//   test_model_server [--spec FILE | --identity DIM] [--no-encoder]
//                     [--declare-dim N] [--fail-first N] [--reject-hello]

#include <unistd.h>

#include <cstdlib>
#include <iostream>
#include <string>

#include "cfaudit/backends/oracle_backend.h"
#include "protocol_server.h"

int main(int argc, char** argv) {
  using namespace cfaudit;
  std::string spec_path;
  std::size_t identity_dim = 3;
  testing::ServerBehavior behavior;
  for (int k = 1; k < argc; ++k) {
    const std::string a = argv[k];
    auto next = [&] { return std::string(k + 1 < argc ? argv[++k] : ""); };
    if (a == "--spec") spec_path = next();
    else if (a == "--identity") identity_dim = std::stoul(next());
    else if (a == "--no-encoder") behavior.expose_encoder = false;
    else if (a == "--declare-dim") behavior.declared_latent_dim = std::stoul(next());
    else if (a == "--fail-first") behavior.fail_first = std::stoi(next());
    else if (a == "--reject-hello") behavior.reject_hello = true;
    else {
      std::cerr << "unknown flag " << a << "\n";
      return 2;
    }
  }
  SyntheticOracleSpec spec = spec_path.empty()
                                 ? SyntheticOracleSpec::Identity(identity_dim)
                                 : SyntheticOracleSpec::Load(spec_path);
  if (spec_path.empty()) spec.w(0) = 1.0;
  OracleBackend model(spec);
  FdChannel channel(dup(STDIN_FILENO), dup(STDOUT_FILENO));
  testing::ServeConnection(model, channel, behavior);
  return 0;
}
