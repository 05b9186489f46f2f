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

#include "cfaudit/stats/stats.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "cfaudit/core/errors.h"

namespace cfaudit {

using nlohmann::json;

CorrelationMatrix ComputeCorrelationMatrix(std::span<const LatentRecord> records,
                                           std::span<const std::string> attrs) {
  if (records.empty()) throw InputError("correlation needs records");
  const std::size_t k = attrs.size();
  const double n = static_cast<double>(records.size());
  std::vector<std::vector<int>> columns(k);
  for (std::size_t a = 0; a < k; ++a) {
    columns[a].reserve(records.size());
    for (const LatentRecord& r : records) {
      const int v = r.Label(attrs[a]);
      if (v != 0 && v != 1) {
        throw InputError("record '" + r.id + "' has non-binary label for '" +
                         attrs[a] + "'");
      }
      columns[a].push_back(v);
    }
  }
  std::vector<double> mean(k), sd(k);
  for (std::size_t a = 0; a < k; ++a) {
    double ones = 0;
    for (int v : columns[a]) ones += v;
    mean[a] = ones / n;
    sd[a] = std::sqrt(mean[a] * (1.0 - mean[a]));
  }
  CorrelationMatrix m;
  m.attributes.assign(attrs.begin(), attrs.end());
  m.values.assign(k, std::vector<std::optional<double>>(k));
  for (std::size_t a = 0; a < k; ++a) {
    if (sd[a] == 0.0) continue;
    m.values[a][a] = 1.0;
    for (std::size_t b = a + 1; b < k; ++b) {
      if (sd[b] == 0.0) continue;
      double both = 0;
      for (std::size_t s = 0; s < records.size(); ++s) {
        both += columns[a][s] * columns[b][s];
      }
      const double cov = both / n - mean[a] * mean[b];
      const double r = std::clamp(cov / (sd[a] * sd[b]), -1.0, 1.0);
      m.values[a][b] = r;
      m.values[b][a] = r;
    }
  }
  return m;
}

namespace {

std::string Fixed(const std::optional<double>& v, const char* fmt) {
  if (!v) return "null";
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, *v);
  return buf;
}

std::optional<double> Ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

DisaggregatedStats Evaluate(std::string name,
                            std::span<const LabelPair> predictions,
                            const std::vector<std::size_t>* indices) {
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
  auto count = [&](const LabelPair& p) {
    if ((p.truth != 0 && p.truth != 1) ||
        (p.predicted != 0 && p.predicted != 1)) {
      throw InputError("labels must be 0 or 1");
    }
    if (p.truth == 1) {
      (p.predicted == 1 ? tp : fn) += 1;
    } else {
      (p.predicted == 1 ? fp : tn) += 1;
    }
  };
  if (indices) {
    for (std::size_t idx : *indices) {
      if (idx >= predictions.size()) {
        throw InputError("slice '" + name + "' indexes past the predictions");
      }
      count(predictions[idx]);
    }
  } else {
    for (const LabelPair& p : predictions) count(p);
  }
  DisaggregatedStats s;
  s.slice = std::move(name);
  s.support = tp + tn + fp + fn;
  s.accuracy = Ratio(tp + tn, s.support);
  s.fpr = Ratio(fp, fp + tn);
  s.fnr = Ratio(fn, fn + tp);
  return s;
}

}  // namespace

std::string CorrelationCsv(const CorrelationMatrix& m) {
  std::string out = "attribute";
  for (const auto& a : m.attributes) out += "," + a;
  out += "\n";
  for (std::size_t i = 0; i < m.attributes.size(); ++i) {
    out += m.attributes[i];
    for (std::size_t j = 0; j < m.attributes.size(); ++j) {
      out += "," + Fixed(m.values[i][j], "%.6f");
    }
    out += "\n";
  }
  return out;
}

std::vector<DisaggregatedStats> DisaggregatedEval(
    std::span<const LabelPair> predictions, std::span<const Slice> slices) {
  std::vector<DisaggregatedStats> rows;
  rows.push_back(Evaluate("Total", predictions, nullptr));
  for (const auto& [name, indices] : slices) {
    rows.push_back(Evaluate(name, predictions, &indices));
  }
  return rows;
}

std::string DisaggregatedCsv(std::span<const DisaggregatedStats> rows) {
  std::string out = "Data split,Accuracy,FPR,FNR\n";
  auto pct = [](const std::optional<double>& v) {
    return v ? Fixed(*v * 100.0, "%.3f") + "%" : std::string("null");
  };
  for (const auto& r : rows) {
    out += r.slice + "," + pct(r.accuracy) + "," + pct(r.fpr) + "," +
           pct(r.fnr) + "\n";
  }
  return out;
}

json DisaggregatedToJson(std::span<const DisaggregatedStats> rows) {
  json out = json::array();
  auto opt = [](const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
  };
  for (const auto& r : rows) {
    out.push_back({{"slice", r.slice},
                   {"support", r.support},
                   {"accuracy", opt(r.accuracy)},
                   {"fpr", opt(r.fpr)},
                   {"fnr", opt(r.fnr)}});
  }
  return out;
}

}  // namespace cfaudit
