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

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cfaudit/core/errors.h"
#include "cfaudit/core/latent.h"
#include "cfaudit/core/rng.h"
#include "cfaudit/stats/stats.h"
#include "gtest/gtest.h"

namespace cfaudit {
namespace {

std::vector<LatentRecord> SignRecords(const std::vector<std::vector<double>>& dirs,
                                      const std::vector<std::string>& names,
                                      std::size_t n, std::uint64_t seed) {
  const auto zs = SamplePrior(seed, n, dirs.front().size());
  std::vector<LatentRecord> out;
  for (std::size_t k = 0; k < n; ++k) {
    LatentRecord r;
    r.id = std::to_string(k);
    r.z = zs[k];
    for (std::size_t a = 0; a < dirs.size(); ++a) {
      r.attrs[names[a]] = Dot(dirs[a], zs[k].values) > 0 ? 1 : 0;
    }
    out.push_back(std::move(r));
  }
  return out;
}

TEST(Correlation, SelfAndAntiCorrelation) {
  auto records = SignRecords({{1, 0}, {-1, 0}, {0, 1}}, {"A", "NotA", "B"}, 2000, 1);
  const std::vector<std::string> attrs = {"A", "NotA", "B"};
  const auto m = ComputeCorrelationMatrix(records, attrs);
  EXPECT_EQ(m.at(0, 0), 1.0);
  EXPECT_NEAR(*m.at(0, 1), -1.0, 1e-12);
  EXPECT_NEAR(*m.at(0, 2), 0.0, 0.1);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      ASSERT_TRUE(m.at(i, j).has_value());
      EXPECT_EQ(*m.at(i, j), *m.at(j, i));
      EXPECT_GE(*m.at(i, j), -1.0 - 1e-12);
      EXPECT_LE(*m.at(i, j), 1.0 + 1e-12);
    }
  }
}

TEST(Correlation, SignLabelsFollowTheAngleLaw) {
  // sign(u.z) and sign(v.z) for Gaussian z agree with probability 1 - theta/pi.
  for (double theta : {0.3, 1.0, std::numbers::pi / 2, 2.5}) {
    auto records = SignRecords({{1, 0, 0}, {std::cos(theta), std::sin(theta), 0}},
                               {"U", "V"}, 100000, 7);
    const std::vector<std::string> attrs = {"U", "V"};
    const auto m = ComputeCorrelationMatrix(records, attrs);
    EXPECT_NEAR(*m.at(0, 1), 1.0 - 2.0 * theta / std::numbers::pi, 0.03) << theta;
  }
}

TEST(Correlation, ConstantColumnIsUndefined) {
  std::vector<LatentRecord> records;
  for (int k = 0; k < 6; ++k) {
    LatentRecord r;
    r.id = std::to_string(k);
    r.z = LatentCode({0.0});
    r.attrs = {{"A", k % 2}, {"C", 1}};
    records.push_back(r);
  }
  const std::vector<std::string> attrs = {"A", "C"};
  const auto m = ComputeCorrelationMatrix(records, attrs);
  EXPECT_EQ(m.at(0, 0), 1.0);
  EXPECT_FALSE(m.at(0, 1).has_value());
  EXPECT_FALSE(m.at(1, 1).has_value());
  EXPECT_EQ(CorrelationCsv(m), "attribute,A,C\nA,1.000000,null\nC,null,null\n");
}

TEST(Correlation, MissingAttributeIsAnInputError) {
  LatentRecord r;
  r.id = "x";
  r.z = LatentCode({0.0});
  r.attrs = {{"A", 1}};
  const std::vector<LatentRecord> records = {r};
  const std::vector<std::string> attrs = {"B"};
  EXPECT_THROW(ComputeCorrelationMatrix(records, attrs), InputError);
}

// 4 TP, 1 FN, 3 TN, 2 FP.
std::vector<LabelPair> TenRecordFixture() {
  std::vector<LabelPair> p;
  for (int k = 0; k < 4; ++k) p.push_back({1, 1});
  p.push_back({1, 0});
  for (int k = 0; k < 3; ++k) p.push_back({0, 0});
  for (int k = 0; k < 2; ++k) p.push_back({0, 1});
  return p;
}

TEST(Disaggregated, TenRecordFixture) {
  const auto p = TenRecordFixture();
  const auto rows = DisaggregatedEval(p, {});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].slice, "Total");
  EXPECT_EQ(rows[0].support, 10u);
  EXPECT_DOUBLE_EQ(*rows[0].accuracy, 0.7);
  EXPECT_DOUBLE_EQ(*rows[0].fpr, 0.4);
  EXPECT_DOUBLE_EQ(*rows[0].fnr, 0.2);
  EXPECT_EQ(DisaggregatedCsv(rows),
            "Data split,Accuracy,FPR,FNR\nTotal,70.000%,40.000%,20.000%\n");
}

TEST(Disaggregated, SlicesAndUndefinedRates) {
  const auto p = TenRecordFixture();
  const std::vector<Slice> slices = {
      {"Positives", {0, 1, 2, 3, 4}}, {"Empty", {}}, {"All", {0, 1, 2, 3, 4, 5, 6, 7, 8, 9}}};
  const auto rows = DisaggregatedEval(p, slices);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[1].slice, "Positives");
  EXPECT_DOUBLE_EQ(*rows[1].accuracy, 0.8);
  EXPECT_FALSE(rows[1].fpr.has_value());
  EXPECT_DOUBLE_EQ(*rows[1].fnr, 0.2);
  EXPECT_EQ(rows[2].support, 0u);
  EXPECT_FALSE(rows[2].accuracy.has_value());
  EXPECT_EQ(rows[3].accuracy, rows[0].accuracy);
  EXPECT_EQ(rows[3].fpr, rows[0].fpr);
  EXPECT_EQ(rows[3].fnr, rows[0].fnr);
  const std::string csv = DisaggregatedCsv(rows);
  EXPECT_NE(csv.find("Positives,80.000%,null,20.000%\n"), std::string::npos);
  EXPECT_NE(csv.find("Empty,null,null,null\n"), std::string::npos);
}

TEST(Disaggregated, PermutationInvariant) {
  auto p = TenRecordFixture();
  const auto before = DisaggregatedCsv(DisaggregatedEval(p, {}));
  Rng rng(5, "test");
  for (std::size_t k = p.size(); k > 1; --k) std::swap(p[k - 1], p[rng.UniformIndex(k)]);
  EXPECT_EQ(DisaggregatedCsv(DisaggregatedEval(p, {})), before);
}

TEST(Disaggregated, OutOfRangeSliceIndex) {
  const auto p = TenRecordFixture();
  const std::vector<Slice> slices = {{"Bad", {10}}};
  EXPECT_THROW(DisaggregatedEval(p, slices), InputError);
}

TEST(Disaggregated, JsonRows) {
  const auto rows = DisaggregatedEval(TenRecordFixture(), {});
  const auto j = DisaggregatedToJson(rows);
  ASSERT_TRUE(j.is_array());
  EXPECT_EQ(j[0]["slice"], "Total");
  EXPECT_EQ(j[0]["support"], 10);
}

}  // namespace
}  // namespace cfaudit
