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

#ifndef CFAUDIT_ATTRVEC_PROBE_H_
#define CFAUDIT_ATTRVEC_PROBE_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cfaudit/core/config.h"
#include "cfaudit/core/types.h"

namespace cfaudit {

// Down-samples `records` so that, within target=1 and target=0, every joint
// cell of the confound labels holds the same number of records: the smallest
// cell count, or `max_per_cell` if that is smaller. Selection inside a cell
// is a seeded shuffle after ordering by id; the result is sorted by id.
// Throws BalanceError naming the first empty cell.
std::vector<LatentRecord> BalanceRecords(
    std::span<const LatentRecord> records, const std::string& target,
    std::span<const std::string> confounds, std::uint64_t seed,
    std::optional<std::size_t> max_per_cell = std::nullopt);

// Pinned optimiser settings for the logistic probe.
struct ProbeOptions {
  double l2 = 1e-3;
  double learning_rate = 0.1;
  std::size_t max_iterations = 2000;
  double gradient_tolerance = 1e-6;
};

struct ProbeFitReport {
  std::string attribute;
  std::size_t train_count = 0;
  std::size_t test_count = 0;
  double test_accuracy = 0.0;
  std::size_t iterations_run = 0;
  double final_loss = 0.0;
  // False when max_iterations ran out; the best iterate is returned.
  bool converged = false;
  // Set when the input was not balanced on class sizes or confounds.
  bool imbalance_warning = false;
  std::string warning;
};

struct ProbeFit {
  AttributeVector vector;
  ProbeFitReport report;
};

// Fits an l2-regularised logistic regression separating target=1 from
// target=0 codes with full-batch gradient descent, and returns the unit
// normal of its decision boundary, oriented towards target=1. The bias is
// fitted and discarded. Records are split per class into train/test by
// config.train_fraction with a seeded shuffle (after ordering by id).
ProbeFit FitLinearProbe(std::span<const LatentRecord> records,
                        const std::string& target, const AuditConfig& config,
                        const ProbeOptions& options = {});

struct ProbeAccuracyRow {
  std::string attribute;
  double test_accuracy = 0.0;
  std::size_t train_count = 0;
  std::size_t test_count = 0;
};

// One row per fitted attribute, sorted by name. Throws DuplicateError if an
// attribute appears twice, InputError for an empty list.
std::vector<ProbeAccuracyRow> ProbeAccuracyReport(std::span<const ProbeFit> fits);
std::string ProbeAccuracyCsv(std::span<const ProbeAccuracyRow> rows);

}  // namespace cfaudit

#endif  // CFAUDIT_ATTRVEC_PROBE_H_
