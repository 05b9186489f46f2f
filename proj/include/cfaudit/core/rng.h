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

#ifndef CFAUDIT_CORE_RNG_H_
#define CFAUDIT_CORE_RNG_H_

#include <cstdint>
#include <string_view>

namespace cfaudit {

// Portable seeded generator: xoshiro256** (Blackman & Vigna) whose state is
// filled by SplitMix64 from `seed` mixed with the FNV-1a-64 hash of a stream
// name. Each stochastic operation uses its own stream name, so adding a
// consumer never shifts the numbers another consumer sees.
//
// All derived variates use only integer arithmetic, IEEE division, sqrt and
// log, so sequences are reproducible across conforming platforms:
//   Uniform01     (next >> 11) * 2^-53
//   UniformIndex  rejection sampling on the top bits, no modulo bias
//   Normal        Marsaglia polar method, spare value cached
class Rng {
 public:
  Rng(std::uint64_t seed, std::string_view stream);

  std::uint64_t Next();
  double Uniform01();
  // Uniform integer in [0, n). n must be positive.
  std::uint64_t UniformIndex(std::uint64_t n);
  double Normal();

 private:
  std::uint64_t s_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t Fnv1a64(std::string_view bytes);

}  // namespace cfaudit

#endif  // CFAUDIT_CORE_RNG_H_
