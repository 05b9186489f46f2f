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

#ifndef CFAUDIT_CORE_CONFIG_H_
#define CFAUDIT_CORE_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace cfaudit {

// Parameters of one audit run. Every stochastic step derives its randomness
// from `seed` plus a per-operation stream name.
struct AuditConfig {
  std::uint64_t seed = 0;
  std::size_t latent_dim = 128;
  // Binary prediction is 1 iff f(x) >= threshold_c.
  double threshold_c = 0.5;
  // Odd, so i = 0 is always a grid point.
  std::size_t grid_points = 21;
  std::size_t samples_per_class = 800;
  double train_fraction = 0.8;
  // Attributes kept equally represented across both probe classes.
  std::vector<std::string> balance_attributes = {"Smiling", "Male"};
  // Attributes the toolkit refuses to manipulate.
  std::vector<std::string> blocked_attributes = {"Male"};
  // Monte Carlo size for the sensitivity and flip-rate estimates.
  std::size_t sample_count = 10000;

  // Throws InputError describing the first violated constraint.
  void Validate() const;

  bool IsBlocked(const std::string& attribute) const;

  nlohmann::json ToJson() const;
  // Missing keys keep their defaults; unknown keys are rejected.
  static AuditConfig FromJson(const nlohmann::json& j);
  static AuditConfig Load(const std::filesystem::path& path);

  // FNV-1a-64 of the compact JSON serialization, as 16 hex digits.
  std::string Hash() const;
};

}  // namespace cfaudit

#endif  // CFAUDIT_CORE_CONFIG_H_
