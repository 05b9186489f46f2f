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

#include "cfaudit/attrvec/probe.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>

#include "cfaudit/core/errors.h"
#include "cfaudit/core/rng.h"

namespace cfaudit {
namespace {

int BinaryLabel(const LatentRecord& r, const std::string& name) {
  const int v = r.Label(name);
  if (v != 0 && v != 1) {
    throw InputError("record '" + r.id + "' has non-binary label for '" +
                     name + "'");
  }
  return v;
}

// Indices of `records` ordered by id; equal ids keep input order.
std::vector<std::size_t> OrderById(std::span<const LatentRecord> records) {
  std::vector<std::size_t> idx(records.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return records[a].id < records[b].id;
  });
  return idx;
}

void Shuffle(std::vector<std::size_t>& v, Rng& rng) {
  for (std::size_t k = v.size(); k > 1; --k) {
    std::swap(v[k - 1], v[rng.UniformIndex(k)]);
  }
}

std::string CellName(const std::string& target, int t,
                     std::span<const std::string> confounds,
                     std::span<const int> values) {
  std::string s = target + "=" + std::to_string(t);
  for (std::size_t k = 0; k < confounds.size(); ++k) {
    s += "," + confounds[k] + "=" + std::to_string(values[k]);
  }
  return s;
}

double StableLogLoss(double margin) {
  // log(1 + exp(-margin))
  return margin > 0 ? std::log1p(std::exp(-margin))
                    : -margin + std::log1p(std::exp(margin));
}

double SigmoidOf(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

std::vector<LatentRecord> BalanceRecords(
    std::span<const LatentRecord> records, const std::string& target,
    std::span<const std::string> confounds, std::uint64_t seed,
    std::optional<std::size_t> max_per_cell) {
  std::vector<std::string> conf;
  for (const std::string& c : confounds) {
    if (c != target && std::find(conf.begin(), conf.end(), c) == conf.end()) {
      conf.push_back(c);
    }
  }
  if (conf.size() > 16) throw InputError("too many confounds to balance");

  // Cell key: target label in bit 0, confound k in bit k+1.
  std::map<std::uint32_t, std::vector<std::size_t>> cells;
  for (std::size_t idx : OrderById(records)) {
    std::uint32_t key = static_cast<std::uint32_t>(BinaryLabel(records[idx], target));
    for (std::size_t k = 0; k < conf.size(); ++k) {
      key |= static_cast<std::uint32_t>(BinaryLabel(records[idx], conf[k]))
             << (k + 1);
    }
    cells[key].push_back(idx);
  }

  const std::uint32_t cell_count = 1u << (conf.size() + 1);
  std::size_t smallest = SIZE_MAX;
  for (std::uint32_t key = 0; key < cell_count; ++key) {
    auto it = cells.find(key);
    if (it == cells.end()) {
      std::vector<int> values(conf.size());
      for (std::size_t k = 0; k < conf.size(); ++k)
        values[k] = static_cast<int>((key >> (k + 1)) & 1u);
      throw BalanceError("no records in cell " +
                         CellName(target, static_cast<int>(key & 1u), conf,
                                  values));
    }
    smallest = std::min(smallest, it->second.size());
  }
  if (max_per_cell) smallest = std::min(smallest, *max_per_cell);

  Rng rng(seed, "balance");
  std::vector<std::size_t> keep;
  for (auto& [key, members] : cells) {
    Shuffle(members, rng);
    keep.insert(keep.end(), members.begin(), members.begin() + smallest);
  }
  std::sort(keep.begin(), keep.end(), [&](std::size_t a, std::size_t b) {
    return records[a].id != records[b].id ? records[a].id < records[b].id
                                          : a < b;
  });
  std::vector<LatentRecord> out;
  out.reserve(keep.size());
  for (std::size_t idx : keep) out.push_back(records[idx]);
  return out;
}

ProbeFit FitLinearProbe(std::span<const LatentRecord> records,
                        const std::string& target, const AuditConfig& config,
                        const ProbeOptions& options) {
  config.Validate();
  if (records.empty()) throw FitError("no records to fit '" + target + "'");
  const std::size_t dim = records.front().z.size();
  for (const LatentRecord& r : records) {
    if (r.z.size() != dim) {
      throw DimensionError("record '" + r.id + "' has latent dim " +
                           std::to_string(r.z.size()) + ", expected " +
                           std::to_string(dim));
    }
    if (!AllFinite(r.z.values)) {
      throw InputError("record '" + r.id + "' has non-finite latent values");
    }
  }

  ProbeFitReport report;
  report.attribute = target;

  std::vector<std::size_t> by_class[2];
  for (std::size_t idx : OrderById(records)) {
    by_class[BinaryLabel(records[idx], target)].push_back(idx);
  }
  if (by_class[0].empty() || by_class[1].empty()) {
    throw FitError("attribute '" + target + "' has an empty class");
  }

  // Re-check balance; a mismatch is reported, not fatal.
  std::vector<std::string> notes;
  if (by_class[0].size() != by_class[1].size()) {
    notes.push_back("class sizes differ (" + std::to_string(by_class[1].size()) +
                    " positive, " + std::to_string(by_class[0].size()) +
                    " negative)");
  }
  for (const std::string& c : config.balance_attributes) {
    if (c == target) continue;
    std::size_t ones[2] = {0, 0};
    bool labelled = true;
    for (int cls = 0; cls < 2 && labelled; ++cls) {
      for (std::size_t idx : by_class[cls]) {
        auto it = records[idx].attrs.find(c);
        if (it == records[idx].attrs.end()) {
          labelled = false;
          break;
        }
        ones[cls] += it->second == 1;
      }
    }
    // Compare proportions exactly: ones1/n1 == ones0/n0.
    if (labelled && ones[1] * by_class[0].size() != ones[0] * by_class[1].size()) {
      notes.push_back("confound '" + c + "' is not balanced");
    }
  }
  if (!notes.empty()) {
    report.imbalance_warning = true;
    for (const std::string& n : notes) {
      if (!report.warning.empty()) report.warning += "; ";
      report.warning += n;
    }
  }

  Rng rng(config.seed, "probe-split");
  std::vector<std::size_t> train, test;
  for (auto& members : by_class) {
    Shuffle(members, rng);
    const auto n = members.size();
    auto n_train = static_cast<std::size_t>(
        std::llround(config.train_fraction * static_cast<double>(n)));
    n_train = std::clamp<std::size_t>(n_train, 1, n);
    if (n >= 2) n_train = std::min(n_train, n - 1);
    train.insert(train.end(), members.begin(), members.begin() + n_train);
    test.insert(test.end(), members.begin() + n_train, members.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  if (test.empty()) throw FitError("no held-out records for '" + target + "'");
  report.train_count = train.size();
  report.test_count = test.size();

  const std::size_t n = train.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> w(dim, 0.0), grad(dim);
  double bias = 0.0;
  std::vector<double> best_w = w;
  double best_bias = 0.0;
  double best_loss = INFINITY;

  // Loss and gradient at (w, bias); returns the loss.
  auto evaluate = [&](double& grad_bias) {
    std::fill(grad.begin(), grad.end(), 0.0);
    grad_bias = 0.0;
    double loss = 0.0;
    for (std::size_t idx : train) {
      const auto& z = records[idx].z.values;
      const double y = records[idx].attrs.at(target);
      double logit = bias;
      for (std::size_t k = 0; k < dim; ++k) logit += w[k] * z[k];
      const double margin = (2.0 * y - 1.0) * logit;
      loss += StableLogLoss(margin);
      const double residual = SigmoidOf(logit) - y;
      for (std::size_t k = 0; k < dim; ++k) grad[k] += residual * z[k];
      grad_bias += residual;
    }
    double reg = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      grad[k] = grad[k] * inv_n + options.l2 * w[k];
      reg += w[k] * w[k];
    }
    grad_bias *= inv_n;
    return loss * inv_n + 0.5 * options.l2 * reg;
  };

  std::size_t iter = 0;
  for (;; ++iter) {
    double grad_bias = 0.0;
    const double loss = evaluate(grad_bias);
    if (loss < best_loss) {
      best_loss = loss;
      best_w = w;
      best_bias = bias;
    }
    double gnorm2 = grad_bias * grad_bias;
    for (double g : grad) gnorm2 += g * g;
    if (std::sqrt(gnorm2) < options.gradient_tolerance) {
      report.converged = true;
      best_loss = loss;
      best_w = w;
      best_bias = bias;
      break;
    }
    if (iter == options.max_iterations) break;
    for (std::size_t k = 0; k < dim; ++k)
      w[k] -= options.learning_rate * grad[k];
    bias -= options.learning_rate * grad_bias;
  }
  report.iterations_run = iter;
  report.final_loss = best_loss;

  std::size_t correct = 0;
  for (std::size_t idx : test) {
    const auto& z = records[idx].z.values;
    double logit = best_bias;
    for (std::size_t k = 0; k < dim; ++k) logit += best_w[k] * z[k];
    correct += (logit >= 0.0 ? 1 : 0) == records[idx].attrs.at(target);
  }
  report.test_accuracy =
      static_cast<double>(correct) / static_cast<double>(test.size());

  if (Norm2(best_w) == 0.0) {
    throw FitError("probe for '" + target + "' produced a zero normal");
  }
  ProbeFit fit{AttributeVector::FromDirection(target, std::move(best_w),
                                              report.test_accuracy),
               report};
  return fit;
}

std::vector<ProbeAccuracyRow> ProbeAccuracyReport(
    std::span<const ProbeFit> fits) {
  if (fits.empty()) throw InputError("probe accuracy report needs fits");
  std::set<std::string> seen;
  std::vector<ProbeAccuracyRow> rows;
  for (const ProbeFit& f : fits) {
    if (!seen.insert(f.report.attribute).second) {
      throw DuplicateError("attribute '" + f.report.attribute +
                           "' appears twice in the probe report");
    }
    rows.push_back({f.report.attribute, f.report.test_accuracy,
                    f.report.train_count, f.report.test_count});
  }
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return a.attribute < b.attribute; });
  return rows;
}

std::string ProbeAccuracyCsv(std::span<const ProbeAccuracyRow> rows) {
  std::string out = "attribute,test_accuracy,train_count,test_count\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.4f", r.test_accuracy);
    out += r.attribute + "," + buf + "," + std::to_string(r.train_count) + "," +
           std::to_string(r.test_count) + "\n";
  }
  return out;
}

}  // namespace cfaudit
