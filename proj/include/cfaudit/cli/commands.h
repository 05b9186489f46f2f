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

#ifndef CFAUDIT_CLI_COMMANDS_H_
#define CFAUDIT_CLI_COMMANDS_H_

#include <exception>
#include <ostream>
#include <string>
#include <vector>

namespace cfaudit::cli {

// Process exit codes. Stable; scripts rely on them.
enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 2,      // malformed input, contract or dimension error
  kExitGuardrail = 3,  // blocked attribute requested
  kExitBackend = 4,    // handshake, transport or model failure
};

int ExitCodeFor(const std::exception& e);

inline constexpr const char* kVersion = "0.1.0";

// Runs the command line `args` (args[0] is the program name). Never throws;
// errors are written to `err` and reflected in the returned exit code.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace cfaudit::cli

#endif  // CFAUDIT_CLI_COMMANDS_H_
