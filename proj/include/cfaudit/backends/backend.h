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

#ifndef CFAUDIT_BACKENDS_BACKEND_H_
#define CFAUDIT_BACKENDS_BACKEND_H_

#include <cstddef>
#include <span>
#include <vector>

#include "cfaudit/core/types.h"

namespace cfaudit {

struct BackendDescriptor {
  std::size_t latent_dim = 0;
  std::vector<std::size_t> image_shape;
  bool has_encoder = false;

  std::size_t image_size() const { return ShapeProduct(image_shape); }
};

// The generator G, encoder E and classifier f an audit interrogates. All
// model calls are batched; result k always corresponds to input k.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual const BackendDescriptor& descriptor() const = 0;

  virtual std::vector<ImageTensor> Generate(
      std::span<const LatentCode> zs) = 0;
  // Throws UnsupportedError when descriptor().has_encoder is false.
  virtual std::vector<LatentCode> Encode(std::span<const ImageTensor> xs) = 0;
  // Probability of the positive class, in [0,1].
  virtual std::vector<double> ClassifyProb(
      std::span<const ImageTensor> xs) = 0;

  // True when the methods may be called concurrently from several threads.
  virtual bool thread_safe() const { return false; }

  // f(G(z)) for each code.
  virtual std::vector<double> ClassifyLatent(std::span<const LatentCode> zs);

  // Single-item conveniences over the batched calls.
  ImageTensor GenerateOne(const LatentCode& z);
  LatentCode EncodeOne(const ImageTensor& x);
  double ClassifyOne(const ImageTensor& x);

 protected:
  void CheckLatent(std::span<const LatentCode> zs) const;
  void CheckImages(std::span<const ImageTensor> xs) const;
};

// Binary prediction, inclusive at the threshold.
inline int ClassifyBinary(double prob, double threshold) {
  return prob >= threshold ? 1 : 0;
}
int ClassifyBinary(Backend& backend, const ImageTensor& x, double threshold);

// Mean l2 distance between z and E(G(z)) over `zs`.
double ReconstructionDiagnostic(Backend& backend,
                                std::span<const LatentCode> zs);

}  // namespace cfaudit

#endif  // CFAUDIT_BACKENDS_BACKEND_H_
