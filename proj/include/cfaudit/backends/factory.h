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

#ifndef CFAUDIT_BACKENDS_FACTORY_H_
#define CFAUDIT_BACKENDS_FACTORY_H_

#include <memory>
#include <string>

#include "cfaudit/backends/backend.h"

namespace cfaudit {

// Opens a backend from a locator string:
//   oracle:PATH       synthetic oracle loaded from a JSON spec
//   tcp:HOST:PORT     remote model server over TCP
//   stdio:COMMAND     remote model server run as a child process
// Throws InputError for malformed locators or specs, BackendError when a
// remote handshake fails.
std::unique_ptr<Backend> OpenBackend(const std::string& locator);

}  // namespace cfaudit

#endif  // CFAUDIT_BACKENDS_FACTORY_H_
