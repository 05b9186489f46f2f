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

#include "cfaudit/attrvec/io.h"

#include <algorithm>
#include <fstream>

#include "cfaudit/core/errors.h"

namespace cfaudit {

using nlohmann::json;

std::vector<LatentRecord> ReadRecords(std::istream& in) {
  std::vector<LatentRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "records line " + std::to_string(line_no);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw InputError(where + ": invalid JSON (" + e.what() + ")");
    }
    try {
      LatentRecord r;
      r.id = j.at("id").get<std::string>();
      r.z = LatentCode(j.at("z").get<std::vector<double>>());
      for (const auto& [name, value] : j.at("attrs").items()) {
        const int label = value.get<int>();
        if (label != 0 && label != 1) {
          throw InputError(where + ": label '" + name + "' is not 0 or 1");
        }
        r.attrs[name] = label;
      }
      if (r.z.size() == 0 || !AllFinite(r.z.values)) {
        throw InputError(where + ": z must be a nonempty finite array");
      }
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw InputError(where + ": malformed record (" + e.what() + ")");
    }
  }
  return out;
}

std::vector<LatentRecord> LoadRecords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open records '" + path.string() + "'");
  return ReadRecords(in);
}

std::string RecordToJsonLine(const LatentRecord& record) {
  json attrs = json::object();
  for (const auto& [name, label] : record.attrs) attrs[name] = label;
  return json{{"id", record.id}, {"z", record.z.values}, {"attrs", attrs}}
      .dump();
}

json AttributeVectorToJson(const AttributeVector& v, std::uint64_t seed) {
  return json{{"attr", v.attribute},
              {"dim", v.dim()},
              {"vector", v.direction},
              {"probe_accuracy", v.probe_accuracy},
              {"seed", seed}};
}

AttributeVector AttributeVectorFromJson(const json& j) {
  AttributeVector v;
  try {
    v.attribute = j.at("attr").get<std::string>();
    v.direction = j.at("vector").get<std::vector<double>>();
    v.probe_accuracy = j.value("probe_accuracy", 0.0);
    if (j.at("dim").get<std::size_t>() != v.direction.size()) {
      throw InputError("attribute vector '" + v.attribute +
                       "': dim does not match vector length");
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed attribute vector: ") + e.what());
  }
  v.Validate();
  return v;
}

AttributeVector LoadAttributeVector(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open attribute vector '" + path.string() + "'");
  }
  try {
    return AttributeVectorFromJson(json::parse(in));
  } catch (const json::parse_error& e) {
    throw InputError("attribute vector '" + path.string() +
                     "' is not valid JSON: " + e.what());
  }
}

std::vector<AttributeVector> LoadAttributeVectors(
    const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw InputError("vector directory '" + dir.string() + "' does not exist");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<AttributeVector> out;
  for (const auto& f : files) out.push_back(LoadAttributeVector(f));
  if (out.empty()) {
    throw InputError("no attribute vectors found in '" + dir.string() + "'");
  }
  return out;
}

}  // namespace cfaudit
