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

#include "cfaudit/backends/oracle_backend.h"

#include <cmath>
#include <fstream>
#include <set>

#include "cfaudit/core/errors.h"
#include "cfaudit/core/latent.h"
#include "cfaudit/core/rng.h"

namespace cfaudit {

using nlohmann::json;

double Sigmoid(double logit) {
  if (logit >= 0.0) return 1.0 / (1.0 + std::exp(-logit));
  const double e = std::exp(logit);
  return e / (1.0 + e);
}

void SyntheticOracleSpec::Validate() const {
  const auto d = static_cast<Eigen::Index>(latent_dim);
  if (latent_dim < 1) throw InputError("oracle latent_dim must be positive");
  if (A.cols() != d) throw InputError("oracle A must have latent_dim columns");
  if (A.rows() < d) {
    throw InputError("oracle A needs at least latent_dim rows");
  }
  if (image_shape.empty() || ShapeProduct(image_shape) != image_dim()) {
    throw InputError("oracle image_shape does not match rows of A");
  }
  if (b.size() != A.rows()) throw InputError("oracle b has the wrong length");
  if (w.size() != A.rows()) throw InputError("oracle w has the wrong length");
  if (!A.allFinite() || !b.allFinite() || !w.allFinite() ||
      !std::isfinite(beta) || !std::isfinite(gamma)) {
    throw InputError("oracle spec has non-finite entries");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  if (qr.rank() != d) throw InputError("oracle A lacks full column rank");
  if (nuisance.size() != 0) {
    if (nuisance.size() != d) {
      throw InputError("oracle nuisance direction has the wrong length");
    }
    if (std::abs(nuisance.norm() - 1.0) > 1e-9) {
      throw InputError("oracle nuisance direction must have unit norm");
    }
  } else if (gamma != 0.0) {
    throw InputError("oracle gamma is nonzero but no nuisance is given");
  }
  for (const auto& [name, u] : attributes) {
    if (u.size() != latent_dim) {
      throw InputError("oracle attribute '" + name + "' has the wrong length");
    }
    if (std::abs(Norm2(u) - 1.0) > 1e-9) {
      throw InputError("oracle attribute '" + name + "' must have unit norm");
    }
  }
}

Eigen::VectorXd SyntheticOracleSpec::LatentLogitWeight() const {
  Eigen::VectorXd v = A.transpose() * w;
  if (nuisance.size() != 0) v += gamma * nuisance;
  return v;
}

double SyntheticOracleSpec::LogitOffset() const { return w.dot(b) + beta; }

double SyntheticOracleSpec::Logit(std::span<const double> z) const {
  const Eigen::VectorXd v = LatentLogitWeight();
  if (z.size() != static_cast<std::size_t>(v.size())) {
    throw DimensionError("oracle logit: latent dim mismatch");
  }
  return LogitOffset() + Dot(std::span<const double>(v.data(), v.size()), z);
}

namespace {

json VectorToJson(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd VectorFromJson(const json& j, const char* what) {
  if (!j.is_array()) throw InputError(std::string("oracle ") + what +
                                      " must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (!j[k].is_number()) {
      throw InputError(std::string("oracle ") + what + " must be numeric");
    }
    v(static_cast<Eigen::Index>(k)) = j[k].get<double>();
  }
  return v;
}

}  // namespace

json SyntheticOracleSpec::ToJson() const {
  json rows = json::array();
  for (Eigen::Index r = 0; r < A.rows(); ++r) {
    rows.push_back(VectorToJson(A.row(r).transpose()));
  }
  json attrs = json::object();
  for (const auto& [name, u] : attributes) attrs[name] = u;
  return json{{"latent_dim", latent_dim},
              {"image_shape", image_shape},
              {"A", rows},
              {"b", VectorToJson(b)},
              {"w", VectorToJson(w)},
              {"beta", beta},
              {"gamma", gamma},
              {"nuisance", nuisance.size() ? VectorToJson(nuisance)
                                           : json(nullptr)},
              {"attributes", attrs}};
}

SyntheticOracleSpec SyntheticOracleSpec::FromJson(const json& j) {
  static const std::set<std::string> kKnown = {
      "latent_dim", "image_shape", "A",        "b",         "w",
      "beta",       "gamma",       "nuisance", "attributes"};
  if (!j.is_object()) throw InputError("oracle spec must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kKnown.count(key)) {
      throw InputError("unknown oracle spec key '" + key + "'");
    }
  }
  SyntheticOracleSpec s;
  try {
    s.latent_dim = j.at("latent_dim").get<std::size_t>();
    const json& rows = j.at("A");
    if (!rows.is_array() || rows.empty()) {
      throw InputError("oracle A must be a nonempty array of rows");
    }
    s.A.resize(static_cast<Eigen::Index>(rows.size()),
               static_cast<Eigen::Index>(s.latent_dim));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      Eigen::VectorXd row = VectorFromJson(rows[r], "A row");
      if (row.size() != static_cast<Eigen::Index>(s.latent_dim)) {
        throw InputError("oracle A row " + std::to_string(r) +
                         " has the wrong length");
      }
      s.A.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    s.image_shape = j.contains("image_shape")
                        ? j.at("image_shape").get<std::vector<std::size_t>>()
                        : std::vector<std::size_t>{rows.size()};
    s.b = j.contains("b") ? VectorFromJson(j.at("b"), "b")
                          : Eigen::VectorXd::Zero(s.A.rows());
    s.w = VectorFromJson(j.at("w"), "w");
    s.beta = j.value("beta", 0.0);
    s.gamma = j.value("gamma", 0.0);
    if (j.contains("nuisance") && !j.at("nuisance").is_null()) {
      s.nuisance = VectorFromJson(j.at("nuisance"), "nuisance");
    }
    if (j.contains("attributes")) {
      for (const auto& [name, u] : j.at("attributes").items()) {
        s.attributes[name] = u.get<std::vector<double>>();
      }
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed oracle spec: ") + e.what());
  }
  s.Validate();
  return s;
}

SyntheticOracleSpec SyntheticOracleSpec::Load(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open oracle spec '" + path.string() + "'");
  try {
    return FromJson(json::parse(in));
  } catch (const json::parse_error& e) {
    throw InputError("oracle spec '" + path.string() +
                     "' is not valid JSON: " + e.what());
  }
}

SyntheticOracleSpec SyntheticOracleSpec::Identity(std::size_t dim) {
  SyntheticOracleSpec s;
  const auto d = static_cast<Eigen::Index>(dim);
  s.latent_dim = dim;
  s.image_shape = {dim};
  s.A = Eigen::MatrixXd::Identity(d, d);
  s.b = Eigen::VectorXd::Zero(d);
  s.w = Eigen::VectorXd::Zero(d);
  return s;
}

OracleBackend::OracleBackend(SyntheticOracleSpec spec)
    : spec_(std::move(spec)) {
  spec_.Validate();
  desc_.latent_dim = spec_.latent_dim;
  desc_.image_shape = spec_.image_shape;
  desc_.has_encoder = true;
  pinv_ = spec_.A.completeOrthogonalDecomposition().pseudoInverse();
  image_weight_ = spec_.w;
  image_offset_ = spec_.beta;
  if (spec_.nuisance.size() != 0 && spec_.gamma != 0.0) {
    const Eigen::VectorXd fold = pinv_.transpose() * spec_.nuisance;
    image_weight_ += spec_.gamma * fold;
    image_offset_ -= spec_.gamma * fold.dot(spec_.b);
  }
}

std::vector<ImageTensor> OracleBackend::Generate(
    std::span<const LatentCode> zs) {
  CheckLatent(zs);
  std::vector<ImageTensor> out;
  out.reserve(zs.size());
  for (const LatentCode& z : zs) {
    Eigen::Map<const Eigen::VectorXd> zv(z.values.data(),
                                         static_cast<Eigen::Index>(z.size()));
    const Eigen::VectorXd x = spec_.A * zv + spec_.b;
    out.emplace_back(desc_.image_shape,
                     std::vector<double>(x.data(), x.data() + x.size()));
  }
  return out;
}

std::vector<LatentCode> OracleBackend::Encode(
    std::span<const ImageTensor> xs) {
  CheckImages(xs);
  std::vector<LatentCode> out;
  out.reserve(xs.size());
  for (const ImageTensor& x : xs) {
    Eigen::Map<const Eigen::VectorXd> xv(x.values.data(),
                                         static_cast<Eigen::Index>(x.size()));
    const Eigen::VectorXd z = pinv_ * (xv - spec_.b);
    out.emplace_back(std::vector<double>(z.data(), z.data() + z.size()));
  }
  return out;
}

std::vector<double> OracleBackend::ClassifyProb(
    std::span<const ImageTensor> xs) {
  CheckImages(xs);
  std::vector<double> out;
  out.reserve(xs.size());
  for (const ImageTensor& x : xs) {
    Eigen::Map<const Eigen::VectorXd> xv(x.values.data(),
                                         static_cast<Eigen::Index>(x.size()));
    out.push_back(Sigmoid(image_weight_.dot(xv) + image_offset_));
  }
  return out;
}

double OracleGroundTruthSensitivity(const SyntheticOracleSpec& spec,
                                    std::span<const double> direction,
                                    double step, std::size_t n,
                                    std::uint64_t seed) {
  spec.Validate();
  if (direction.size() != spec.latent_dim) {
    throw DimensionError("oracle sensitivity: direction dim mismatch");
  }
  if (n == 0) throw InputError("oracle sensitivity needs n >= 1");
  const Eigen::VectorXd weight = spec.LatentLogitWeight();
  const std::span<const double> wv(weight.data(), weight.size());
  const double offset = spec.LogitOffset();
  const double shift = step * Dot(wv, direction);
  // Regenerates the prior stream code by code instead of materialising n
  // vectors.
  Rng rng(seed, "prior");
  std::vector<double> z(spec.latent_dim);
  double total = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    for (double& v : z) v = rng.Normal();
    const double logit = offset + Dot(wv, z);
    total += Sigmoid(logit + shift) - Sigmoid(logit);
  }
  return total / static_cast<double>(n);
}

SyntheticOracleSpec RandomOracleSpec(const RandomOracleOptions& o) {
  if (o.image_dim < o.latent_dim) {
    throw InputError("oracle image_dim must be at least latent_dim");
  }
  Rng rng(o.seed, "oracle");
  const auto d = static_cast<Eigen::Index>(o.latent_dim);
  const auto m = static_cast<Eigen::Index>(o.image_dim);
  SyntheticOracleSpec s;
  s.latent_dim = o.latent_dim;
  s.image_shape = {o.image_dim};
  s.A.resize(m, d);
  for (Eigen::Index r = 0; r < m; ++r)
    for (Eigen::Index c = 0; c < d; ++c) s.A(r, c) = rng.Normal();
  s.b.resize(m);
  for (Eigen::Index r = 0; r < m; ++r) s.b(r) = 0.1 * rng.Normal();
  for (const std::string& name : o.attributes) {
    std::vector<double> u(o.latent_dim);
    for (double& v : u) v = rng.Normal();
    const double norm = Norm2(u);
    for (double& v : u) v /= norm;
    s.attributes[name] = std::move(u);
  }
  s.w = Eigen::VectorXd::Zero(m);
  if (!o.classifier_attribute.empty()) {
    auto it = s.attributes.find(o.classifier_attribute);
    if (it == s.attributes.end()) {
      throw InputError("classifier attribute '" + o.classifier_attribute +
                       "' is not among the oracle attributes");
    }
    // Minimum-norm w with A^T w = scale * u.
    Eigen::Map<const Eigen::VectorXd> u(it->second.data(), d);
    const Eigen::MatrixXd pinv =
        s.A.completeOrthogonalDecomposition().pseudoInverse();
    s.w = o.classifier_scale * (pinv.transpose() * u);
  }
  // Centre the classifier so f(G(0)) = 0.5.
  s.beta = -s.w.dot(s.b);
  if (!o.bias_attribute.empty()) {
    auto it = s.attributes.find(o.bias_attribute);
    if (it == s.attributes.end()) {
      throw InputError("bias attribute '" + o.bias_attribute +
                       "' is not among the oracle attributes");
    }
    s.nuisance = Eigen::Map<const Eigen::VectorXd>(it->second.data(), d);
    s.gamma = o.gamma;
  }
  s.Validate();
  return s;
}

}  // namespace cfaudit
