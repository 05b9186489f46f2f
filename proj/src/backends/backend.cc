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

#include "cfaudit/backends/backend.h"

#include <cmath>
#include <string>

#include "cfaudit/core/errors.h"

namespace cfaudit {

std::vector<double> Backend::ClassifyLatent(std::span<const LatentCode> zs) {
  const std::vector<ImageTensor> images = Generate(zs);
  return ClassifyProb(images);
}

ImageTensor Backend::GenerateOne(const LatentCode& z) {
  return std::move(Generate(std::span<const LatentCode>(&z, 1)).front());
}

LatentCode Backend::EncodeOne(const ImageTensor& x) {
  return std::move(Encode(std::span<const ImageTensor>(&x, 1)).front());
}

double Backend::ClassifyOne(const ImageTensor& x) {
  return ClassifyProb(std::span<const ImageTensor>(&x, 1)).front();
}

void Backend::CheckLatent(std::span<const LatentCode> zs) const {
  const std::size_t dim = descriptor().latent_dim;
  for (const LatentCode& z : zs) {
    if (z.size() != dim) {
      throw DimensionError("latent code has dim " + std::to_string(z.size()) +
                           ", backend expects " + std::to_string(dim));
    }
  }
}

void Backend::CheckImages(std::span<const ImageTensor> xs) const {
  const auto& shape = descriptor().image_shape;
  for (const ImageTensor& x : xs) {
    if (x.shape != shape || x.values.size() != ShapeProduct(shape)) {
      throw DimensionError("image shape does not match backend image_shape");
    }
  }
}

int ClassifyBinary(Backend& backend, const ImageTensor& x, double threshold) {
  return ClassifyBinary(backend.ClassifyOne(x), threshold);
}

double ReconstructionDiagnostic(Backend& backend,
                                std::span<const LatentCode> zs) {
  if (!backend.descriptor().has_encoder) {
    throw UnsupportedError("backend has no encoder");
  }
  if (zs.empty()) throw InputError("reconstruction diagnostic needs codes");
  const std::vector<ImageTensor> images = backend.Generate(zs);
  const std::vector<LatentCode> recon = backend.Encode(images);
  double total = 0.0;
  for (std::size_t s = 0; s < zs.size(); ++s) {
    double sq = 0.0;
    for (std::size_t k = 0; k < zs[s].size(); ++k) {
      const double diff = zs[s][k] - recon[s][k];
      sq += diff * diff;
    }
    total += std::sqrt(sq);
  }
  return total / static_cast<double>(zs.size());
}

}  // namespace cfaudit
