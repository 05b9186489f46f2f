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

#include "cfaudit/core/types.h"

#include <cmath>
#include <numeric>

#include "cfaudit/core/errors.h"

namespace cfaudit {

AttributeVector AttributeVector::FromDirection(std::string attribute,
                                               std::vector<double> direction,
                                               double probe_accuracy) {
  if (!AllFinite(direction)) {
    throw InputError("attribute vector '" + attribute +
                     "' has non-finite entries");
  }
  const double norm = Norm2(direction);
  if (norm == 0.0) {
    throw InputError("attribute vector '" + attribute + "' is zero");
  }
  for (double& v : direction) v /= norm;
  AttributeVector out;
  out.attribute = std::move(attribute);
  out.direction = std::move(direction);
  out.probe_accuracy = probe_accuracy;
  return out;
}

void AttributeVector::Validate() const {
  if (direction.empty()) {
    throw InputError("attribute vector '" + attribute + "' is empty");
  }
  if (!AllFinite(direction)) {
    throw InputError("attribute vector '" + attribute +
                     "' has non-finite entries");
  }
  if (std::abs(Norm2(direction) - 1.0) > kUnitNormTolerance) {
    throw InputError("attribute vector '" + attribute +
                     "' does not have unit l2 norm");
  }
  if (!(probe_accuracy >= 0.0 && probe_accuracy <= 1.0)) {
    throw InputError("attribute vector '" + attribute +
                     "' has probe accuracy outside [0,1]");
  }
}

int LatentRecord::Label(const std::string& name) const {
  auto it = attrs.find(name);
  if (it == attrs.end()) {
    throw InputError("record '" + id + "' has no label for '" + name + "'");
  }
  return it->second;
}

ImageTensor::ImageTensor(std::vector<std::size_t> s, std::vector<double> v)
    : shape(std::move(s)), values(std::move(v)) {
  if (shape.empty() || ShapeProduct(shape) != values.size()) {
    throw DimensionError("image shape does not match value count");
  }
}

std::size_t ShapeProduct(std::span<const std::size_t> shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

double Dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimensionError("dot product of vectors with lengths " +
                         std::to_string(a.size()) + " and " +
                         std::to_string(b.size()));
  }
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double Norm2(std::span<const double> a) { return std::sqrt(Dot(a, a)); }

bool AllFinite(std::span<const double> a) {
  for (double v : a) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace cfaudit
