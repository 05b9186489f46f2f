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

#include "cfaudit/core/latent.h"

#include <string>

#include "cfaudit/core/errors.h"
#include "cfaudit/core/rng.h"

namespace cfaudit {

LatentCode Traverse(const LatentCode& z, std::span<const double> direction,
                    double step) {
  if (z.size() != direction.size()) {
    throw DimensionError("cannot traverse code of dim " +
                         std::to_string(z.size()) + " along direction of dim " +
                         std::to_string(direction.size()));
  }
  std::vector<double> out(z.values);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += step * direction[k];
  return LatentCode(std::move(out));
}

LatentCode Traverse(const LatentCode& z, const AttributeVector& d,
                    double step) {
  return Traverse(z, std::span<const double>(d.direction), step);
}

std::vector<LatentCode> SamplePrior(std::uint64_t seed, std::size_t n,
                                    std::size_t dim) {
  Rng rng(seed, "prior");
  std::vector<LatentCode> out;
  out.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<double> v(dim);
    for (double& x : v) x = rng.Normal();
    out.emplace_back(std::move(v));
  }
  return out;
}

std::vector<LatentCode> SamplePrior(const AuditConfig& config, std::size_t n) {
  return SamplePrior(config.seed, n, config.latent_dim);
}

}  // namespace cfaudit
