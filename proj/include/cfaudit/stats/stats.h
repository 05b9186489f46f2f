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

#ifndef CFAUDIT_STATS_STATS_H_
#define CFAUDIT_STATS_STATS_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cfaudit/core/types.h"
#include "json.hpp"

namespace cfaudit {

// Pearson (phi) correlation between binary label columns. Rows and columns
// of constant attributes are undefined rather than zero.
struct CorrelationMatrix {
  std::vector<std::string> attributes;
  std::vector<std::vector<std::optional<double>>> values;

  std::optional<double> at(std::size_t i, std::size_t j) const {
    return values[i][j];
  }
};

CorrelationMatrix ComputeCorrelationMatrix(std::span<const LatentRecord> records,
                                           std::span<const std::string> attrs);
std::string CorrelationCsv(const CorrelationMatrix& m);

struct LabelPair {
  int truth = 0;
  int predicted = 0;
};

struct DisaggregatedStats {
  std::string slice;
  std::size_t support = 0;
  std::optional<double> accuracy;  // unset for an empty slice
  std::optional<double> fpr;       // unset without negatives
  std::optional<double> fnr;       // unset without positives
};

using Slice = std::pair<std::string, std::vector<std::size_t>>;

// Accuracy, FPR = FP/(FP+TN) and FNR = FN/(FN+TP) for a leading "Total" row
// over every prediction, then for each slice in the given order. Slice
// indices refer to `predictions`.
std::vector<DisaggregatedStats> DisaggregatedEval(
    std::span<const LabelPair> predictions, std::span<const Slice> slices);

// "Data split,Accuracy,FPR,FNR" with percentages to three decimals.
std::string DisaggregatedCsv(std::span<const DisaggregatedStats> rows);
nlohmann::json DisaggregatedToJson(std::span<const DisaggregatedStats> rows);

}  // namespace cfaudit

#endif  // CFAUDIT_STATS_STATS_H_
