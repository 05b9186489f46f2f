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

#ifndef CFAUDIT_BACKENDS_ORACLE_BACKEND_H_
#define CFAUDIT_BACKENDS_ORACLE_BACKEND_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cfaudit/backends/backend.h"
#include "json.hpp"

namespace cfaudit {

// Analytic stand-in for a trained generator/encoder/classifier triple:
//
//   G(z)   = A z + b
//   E(x)   = A^+ (x - b)                      (Moore-Penrose left inverse)
//   f(x)   = sigmoid(w.x + beta + gamma * u_n.E(x))
//
// The gamma term injects a classifier dependence on the latent nuisance
// direction u_n that does not pass through w, so a known bias can be planted.
// `attributes` holds the ground-truth unit direction of each named attribute;
// synthetic records label attribute k as 1 iff u_k.z > 0.
struct SyntheticOracleSpec {
  std::size_t latent_dim = 0;
  std::vector<std::size_t> image_shape;
  Eigen::MatrixXd A;  // image_dim x latent_dim
  Eigen::VectorXd b;
  Eigen::VectorXd w;
  double beta = 0.0;
  double gamma = 0.0;
  Eigen::VectorXd nuisance;  // empty when no bias is injected
  std::map<std::string, std::vector<double>> attributes;

  std::size_t image_dim() const { return static_cast<std::size_t>(A.rows()); }

  // Throws InputError on inconsistent sizes, rank-deficient A or non-unit
  // directions.
  void Validate() const;

  // Latent-space weight of the logit: A^T w + gamma u_n.
  Eigen::VectorXd LatentLogitWeight() const;
  double LogitOffset() const;  // w.b + beta
  double Logit(std::span<const double> z) const;

  nlohmann::json ToJson() const;
  static SyntheticOracleSpec FromJson(const nlohmann::json& j);
  static SyntheticOracleSpec Load(const std::filesystem::path& path);

  // A = I (image_dim = latent_dim), b = 0, no nuisance.
  static SyntheticOracleSpec Identity(std::size_t dim);
};

class OracleBackend final : public Backend {
 public:
  explicit OracleBackend(SyntheticOracleSpec spec);

  const BackendDescriptor& descriptor() const override { return desc_; }
  std::vector<ImageTensor> Generate(std::span<const LatentCode> zs) override;
  std::vector<LatentCode> Encode(std::span<const ImageTensor> xs) override;
  std::vector<double> ClassifyProb(std::span<const ImageTensor> xs) override;
  bool thread_safe() const override { return true; }

  const SyntheticOracleSpec& spec() const { return spec_; }

 private:
  SyntheticOracleSpec spec_;
  BackendDescriptor desc_;
  Eigen::MatrixXd pinv_;  // latent_dim x image_dim
  // Image-space weight folding the nuisance term: w + gamma (A^+)^T u_n.
  Eigen::VectorXd image_weight_;
  double image_offset_ = 0.0;
};

double Sigmoid(double logit);

// Monte Carlo estimate of E_z[sigmoid(l(z) + step*t) - sigmoid(l(z))], where
// l is the oracle logit and t the exact logit shift induced by `direction`.
// Computed from the oracle's matrices alone; uses the same prior stream as
// SamplePrior(seed, n, latent_dim), so estimates can share samples with a
// backend-driven run.
double OracleGroundTruthSensitivity(const SyntheticOracleSpec& spec,
                                    std::span<const double> direction,
                                    double step, std::size_t n,
                                    std::uint64_t seed);

// Options for a randomly drawn oracle.
struct RandomOracleOptions {
  std::uint64_t seed = 0;
  std::size_t latent_dim = 8;
  std::size_t image_dim = 16;
  std::vector<std::string> attributes = {"Smiling", "Young"};
  // The classifier reads this attribute: A^T w = classifier_scale * u.
  std::string classifier_attribute = "Smiling";
  double classifier_scale = 2.0;
  // Optional injected bias along another attribute's direction.
  std::string bias_attribute;
  double gamma = 0.0;
};

// Random full-rank A and random unit attribute directions, stream "oracle".
SyntheticOracleSpec RandomOracleSpec(const RandomOracleOptions& options);

}  // namespace cfaudit

#endif  // CFAUDIT_BACKENDS_ORACLE_BACKEND_H_
