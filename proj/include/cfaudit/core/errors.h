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

#ifndef CFAUDIT_CORE_ERRORS_H_
#define CFAUDIT_CORE_ERRORS_H_

#include <stdexcept>
#include <string>

namespace cfaudit {

// Root of every error raised by the toolkit. The CLI maps subclasses onto
// process exit codes (see ExitCodeFor in cli/commands.h).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Vector lengths or tensor shapes disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Malformed input: bad JSON, invalid config values, too few samples.
class InputError : public Error {
 public:
  using Error::Error;
};

// Transport or model failure on a backend.
class BackendError : public Error {
 public:
  using Error::Error;
};

// The backend does not offer the requested operation (e.g. no encoder).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// A joint confound cell required for balancing has no records.
class BalanceError : public Error {
 public:
  using Error::Error;
};

// A linear probe cannot be fitted (e.g. one class is empty).
class FitError : public Error {
 public:
  using Error::Error;
};

class DuplicateError : public Error {
 public:
  using Error::Error;
};

// The requested attribute is on the configured block list.
class GuardrailError : public Error {
 public:
  using Error::Error;
};

}  // namespace cfaudit

#endif  // CFAUDIT_CORE_ERRORS_H_
