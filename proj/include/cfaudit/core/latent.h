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

#ifndef CFAUDIT_CORE_LATENT_H_
#define CFAUDIT_CORE_LATENT_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cfaudit/core/config.h"
#include "cfaudit/core/types.h"

namespace cfaudit {

// z + step * direction. Steps outside [-1, 1] are allowed.
LatentCode Traverse(const LatentCode& z, std::span<const double> direction,
                    double step);
LatentCode Traverse(const LatentCode& z, const AttributeVector& d, double step);

// n i.i.d. standard normal codes of length `dim` from stream "prior".
std::vector<LatentCode> SamplePrior(std::uint64_t seed, std::size_t n,
                                    std::size_t dim);
std::vector<LatentCode> SamplePrior(const AuditConfig& config, std::size_t n);

}  // namespace cfaudit

#endif  // CFAUDIT_CORE_LATENT_H_
