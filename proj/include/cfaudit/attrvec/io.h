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

#ifndef CFAUDIT_ATTRVEC_IO_H_
#define CFAUDIT_ATTRVEC_IO_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "cfaudit/core/types.h"
#include "json.hpp"

namespace cfaudit {

// Latent record files are JSON Lines:
//   {"id": "...", "z": [...], "attrs": {"Smiling": 1, ...}}
// Blank lines are skipped. Errors name the 1-based line number.
std::vector<LatentRecord> ReadRecords(std::istream& in);
std::vector<LatentRecord> LoadRecords(const std::filesystem::path& path);
std::string RecordToJsonLine(const LatentRecord& record);

// Attribute vector files:
//   {"attr": name, "dim": D, "vector": [...], "probe_accuracy": a, "seed": s}
nlohmann::json AttributeVectorToJson(const AttributeVector& v,
                                     std::uint64_t seed);
AttributeVector AttributeVectorFromJson(const nlohmann::json& j);
AttributeVector LoadAttributeVector(const std::filesystem::path& path);
// Every *.json file in `dir`, ordered by file name.
std::vector<AttributeVector> LoadAttributeVectors(
    const std::filesystem::path& dir);

}  // namespace cfaudit

#endif  // CFAUDIT_ATTRVEC_IO_H_
