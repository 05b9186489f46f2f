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

#include "cfaudit/core/config.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include "cfaudit/core/errors.h"
#include "cfaudit/core/rng.h"

namespace cfaudit {

using nlohmann::json;

void AuditConfig::Validate() const {
  if (latent_dim < 1) throw InputError("latent_dim must be positive");
  if (!(threshold_c >= 0.0 && threshold_c <= 1.0)) {
    throw InputError("threshold_c must lie in [0,1]");
  }
  if (grid_points < 3 || grid_points % 2 == 0) {
    throw InputError("grid_points must be odd and at least 3");
  }
  if (samples_per_class < 1) {
    throw InputError("samples_per_class must be positive");
  }
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InputError("train_fraction must lie in (0,1)");
  }
  if (sample_count < 1) throw InputError("sample_count must be positive");
}

bool AuditConfig::IsBlocked(const std::string& attribute) const {
  return std::find(blocked_attributes.begin(), blocked_attributes.end(),
                   attribute) != blocked_attributes.end();
}

json AuditConfig::ToJson() const {
  return json{{"seed", seed},
              {"latent_dim", latent_dim},
              {"threshold_c", threshold_c},
              {"grid_points", grid_points},
              {"samples_per_class", samples_per_class},
              {"train_fraction", train_fraction},
              {"balance_attributes", balance_attributes},
              {"blocked_attributes", blocked_attributes},
              {"sample_count", sample_count}};
}

namespace {

template <typename T>
void ReadKey(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) {
    try {
      out = it->get<T>();
    } catch (const json::exception& e) {
      throw InputError(std::string("config key '") + key +
                       "' has the wrong type: " + e.what());
    }
  }
}

void ReadCount(const json& j, const char* key, std::size_t& out) {
  if (auto it = j.find(key); it != j.end()) {
    if (!it->is_number_integer() || it->get<long long>() < 0) {
      throw InputError(std::string("config key '") + key +
                       "' must be a non-negative integer");
    }
    out = it->get<std::size_t>();
  }
}

}  // namespace

AuditConfig AuditConfig::FromJson(const json& j) {
  if (!j.is_object()) throw InputError("config must be a JSON object");
  static const std::set<std::string> kKnown = {
      "seed",           "latent_dim",         "threshold_c",
      "grid_points",    "samples_per_class",  "train_fraction",
      "balance_attributes", "blocked_attributes", "sample_count"};
  for (const auto& [key, value] : j.items()) {
    if (!kKnown.count(key)) {
      throw InputError("unknown config key '" + key + "'");
    }
  }
  AuditConfig c;
  if (auto it = j.find("seed"); it != j.end()) {
    if (!it->is_number_unsigned()) {
      throw InputError("config key 'seed' must be an unsigned integer");
    }
    c.seed = it->get<std::uint64_t>();
  }
  ReadCount(j, "latent_dim", c.latent_dim);
  ReadKey(j, "threshold_c", c.threshold_c);
  ReadCount(j, "grid_points", c.grid_points);
  ReadCount(j, "samples_per_class", c.samples_per_class);
  ReadKey(j, "train_fraction", c.train_fraction);
  ReadKey(j, "balance_attributes", c.balance_attributes);
  ReadKey(j, "blocked_attributes", c.blocked_attributes);
  ReadCount(j, "sample_count", c.sample_count);
  c.Validate();
  return c;
}

AuditConfig AuditConfig::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("config '" + path.string() + "' is not valid JSON: " +
                     e.what());
  }
  return FromJson(j);
}

std::string AuditConfig::Hash() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(Fnv1a64(ToJson().dump())));
  return buf;
}

}  // namespace cfaudit
