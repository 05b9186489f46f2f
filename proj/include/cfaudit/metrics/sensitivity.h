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

#ifndef CFAUDIT_METRICS_SENSITIVITY_H_
#define CFAUDIT_METRICS_SENSITIVITY_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cfaudit/backends/backend.h"
#include "cfaudit/core/config.h"
#include "cfaudit/core/types.h"
#include "json.hpp"

namespace cfaudit {

// All means are accumulated in chunks of this many terms, chunk sums being
// added left to right, so results do not depend on thread scheduling.
inline constexpr std::size_t kReductionChunk = 1024;

struct Estimate {
  double value = 0.0;
  // Sample standard deviation / sqrt(n); 0 when n == 1.
  double stderr_ = 0.0;
};

// Mean and standard error of `terms` in the fixed chunked order.
Estimate ChunkedMean(std::span<const double> terms);

// Effects below this are floating-point rounding in the probabilities, not
// signal; paired differences of that size also have a rounding-sized stderr.
inline constexpr double kSensitivityResolution = 1e-12;

// |value| >= 3 stderr and above the resolution floor.
bool Flagged(const Estimate& e);

// f(G(z)) for every code, evaluated chunk by chunk, concurrently when the
// backend is thread safe.
std::vector<double> EvaluateProbabilities(Backend& backend,
                                          std::span<const LatentCode> zs);

// Mean over zs of f(G(z + displacement)) - f(G(z)), both terms evaluated at
// the same z.
Estimate SensitivityContinuous(Backend& backend,
                               std::span<const double> displacement,
                               std::span<const LatentCode> zs);

struct SweepCurve {
  std::string attribute;
  std::vector<double> grid;
  std::vector<double> values;
  std::vector<double> stderrs;
  // R^2 of a least-squares line through (grid, values); nullopt when the
  // curve is flat.
  std::optional<double> linearity_r2;
};

// `points` equally spaced steps in [-1, 1]; the centre is exactly 0.
std::vector<double> SweepGrid(std::size_t points);

// S_f(i d) for i on SweepGrid(config.grid_points), reusing one set of codes
// for every grid point. The overload without `zs` draws
// config.sample_count codes from the prior.
SweepCurve Sweep(Backend& backend, const AttributeVector& d,
                 const AuditConfig& config, std::span<const LatentCode> zs);
SweepCurve Sweep(Backend& backend, const AttributeVector& d,
                 const AuditConfig& config);

// 1 iff the binary prediction at z + displacement differs from that at z.
int FlipIndicator(Backend& backend, const LatentCode& z,
                  std::span<const double> displacement, double threshold);

struct FlipReport {
  std::string attribute;
  // Unset when the conditioning set is empty.
  std::optional<double> s_1to0;
  std::optional<double> s_0to1;
  std::size_t n_positive_base = 0;
  std::size_t n_negative_base = 0;
};

// Fraction of base-positive codes that flip to negative (s_1to0), and of
// base-negative codes that flip to positive (s_0to1), under displacement
// step * d.
FlipReport FlipRates(Backend& backend, std::string attribute,
                     std::span<const double> displacement,
                     std::span<const LatentCode> zs, double threshold);
FlipReport FlipRates(Backend& backend, const AttributeVector& d,
                     std::span<const LatentCode> zs, double threshold,
                     double step = 1.0);

// Draws `pairs` pairs of distinct codes from `zs` (all with base label
// `label`), samples one point uniformly on each connecting segment and
// returns the fraction still classified as `label`. Throws InputError with
// fewer than two codes.
double InterpolationConsistency(Backend& backend,
                                std::span<const LatentCode> zs, int label,
                                std::size_t pairs, double threshold,
                                std::uint64_t seed);

std::string SweepCsv(const SweepCurve& curve);
nlohmann::json SweepToJson(const SweepCurve& curve);
// Rows "attribute,s_1to0,s_0to1" with rates to three decimals, "null" when
// undefined.
std::string FlipCsv(std::span<const FlipReport> reports);
nlohmann::json FlipToJson(const FlipReport& report);

}  // namespace cfaudit

#endif  // CFAUDIT_METRICS_SENSITIVITY_H_
