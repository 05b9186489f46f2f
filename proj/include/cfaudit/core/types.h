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

#ifndef CFAUDIT_CORE_TYPES_H_
#define CFAUDIT_CORE_TYPES_H_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace cfaudit {

// A point in the generator's latent space.
struct LatentCode {
  std::vector<double> values;

  LatentCode() = default;
  explicit LatentCode(std::vector<double> v) : values(std::move(v)) {}

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t k) const { return values[k]; }
  std::span<const double> span() const { return values; }

  bool operator==(const LatentCode&) const = default;
};

// A unit-norm latent direction associated with one annotated attribute.
struct AttributeVector {
  std::string attribute;
  std::vector<double> direction;
  double probe_accuracy = 0.0;

  std::size_t dim() const { return direction.size(); }

  // Builds a vector from an arbitrary nonzero direction by scaling it to
  // unit l2 norm. Throws InputError for zero or non-finite input.
  static AttributeVector FromDirection(std::string attribute,
                                       std::vector<double> direction,
                                       double probe_accuracy = 0.0);

  // Throws InputError unless entries are finite and the norm is 1 within
  // kUnitNormTolerance.
  void Validate() const;

  static constexpr double kUnitNormTolerance = 1e-9;
};

// A latent code with binary attribute annotations.
struct LatentRecord {
  std::string id;
  LatentCode z;
  std::map<std::string, int> attrs;

  // Label for `name`; throws InputError when the record does not carry it.
  int Label(const std::string& name) const;
};

// Row-major image with an explicit shape.
struct ImageTensor {
  std::vector<std::size_t> shape;
  std::vector<double> values;

  ImageTensor() = default;
  ImageTensor(std::vector<std::size_t> s, std::vector<double> v);

  std::size_t size() const { return values.size(); }
  bool operator==(const ImageTensor&) const = default;
};

std::size_t ShapeProduct(std::span<const std::size_t> shape);

// Small dense helpers used across modules.
double Dot(std::span<const double> a, std::span<const double> b);
double Norm2(std::span<const double> a);
bool AllFinite(std::span<const double> a);

}  // namespace cfaudit

#endif  // CFAUDIT_CORE_TYPES_H_
