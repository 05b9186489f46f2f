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

#include "cfaudit/metrics/sensitivity.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <thread>

#include "cfaudit/core/errors.h"
#include "cfaudit/core/latent.h"
#include "cfaudit/core/rng.h"

namespace cfaudit {

using nlohmann::json;

namespace {

double ChunkedSum(std::span<const double> terms,
                  double (*map)(double, double), double arg) {
  double total = 0.0;
  for (std::size_t start = 0; start < terms.size(); start += kReductionChunk) {
    const std::size_t end = std::min(terms.size(), start + kReductionChunk);
    double chunk = 0.0;
    for (std::size_t k = start; k < end; ++k) chunk += map(terms[k], arg);
    total += chunk;
  }
  return total;
}

std::string FormatNumber(double v, const char* fmt) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

std::string FormatRate(const std::optional<double>& v) {
  return v ? FormatNumber(*v, "%.3f") : "null";
}

json OptionalJson(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

bool IsZero(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

std::vector<LatentCode> Displaced(std::span<const LatentCode> zs,
                                  std::span<const double> displacement) {
  std::vector<LatentCode> out;
  out.reserve(zs.size());
  for (const LatentCode& z : zs) out.push_back(Traverse(z, displacement, 1.0));
  return out;
}

}  // namespace

bool Flagged(const Estimate& e) {
  return std::abs(e.value) > kSensitivityResolution &&
         std::abs(e.value) >= 3.0 * e.stderr_;
}

Estimate ChunkedMean(std::span<const double> terms) {
  if (terms.empty()) throw InputError("mean of an empty sample");
  const double n = static_cast<double>(terms.size());
  Estimate e;
  e.value = ChunkedSum(terms, [](double x, double) { return x; }, 0.0) / n;
  if (terms.size() > 1) {
    const double ss = ChunkedSum(
        terms, [](double x, double m) { return (x - m) * (x - m); }, e.value);
    e.stderr_ = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return e;
}

std::vector<double> EvaluateProbabilities(Backend& backend,
                                          std::span<const LatentCode> zs) {
  std::vector<double> out(zs.size());
  const std::size_t chunks = (zs.size() + kReductionChunk - 1) / kReductionChunk;
  auto run_chunk = [&](std::size_t c) {
    const std::size_t start = c * kReductionChunk;
    const std::size_t end = std::min(zs.size(), start + kReductionChunk);
    const std::vector<double> probs =
        backend.ClassifyLatent(zs.subspan(start, end - start));
    if (probs.size() != end - start) {
      throw BackendError("backend returned the wrong number of results");
    }
    std::copy(probs.begin(), probs.end(), out.begin() + start);
  };
  const std::size_t workers = std::min<std::size_t>(
      chunks, backend.thread_safe() ? std::thread::hardware_concurrency() : 1);
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
    return out;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (std::size_t c = w; c < chunks; c += workers) run_chunk(c);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

namespace {

Estimate PairedDifference(Backend& backend, std::span<const double> base,
                          std::span<const double> displacement,
                          std::span<const LatentCode> zs) {
  std::vector<double> diffs(zs.size(), 0.0);
  // The displaced codes are bit-identical to zs, so both terms coincide.
  if (!IsZero(displacement)) {
    const std::vector<double> moved =
        EvaluateProbabilities(backend, Displaced(zs, displacement));
    for (std::size_t k = 0; k < zs.size(); ++k) diffs[k] = moved[k] - base[k];
  }
  return ChunkedMean(diffs);
}

void CheckDisplacement(const Backend& backend,
                       std::span<const double> displacement) {
  if (displacement.size() != backend.descriptor().latent_dim) {
    throw DimensionError("displacement has dim " +
                         std::to_string(displacement.size()) +
                         ", backend expects " +
                         std::to_string(backend.descriptor().latent_dim));
  }
  if (!AllFinite(displacement)) {
    throw InputError("displacement has non-finite entries");
  }
}

}  // namespace

Estimate SensitivityContinuous(Backend& backend,
                               std::span<const double> displacement,
                               std::span<const LatentCode> zs) {
  if (zs.empty()) throw InputError("sensitivity needs at least one code");
  CheckDisplacement(backend, displacement);
  const std::vector<double> base = EvaluateProbabilities(backend, zs);
  return PairedDifference(backend, base, displacement, zs);
}

std::vector<double> SweepGrid(std::size_t points) {
  if (points < 3 || points % 2 == 0) {
    throw InputError("sweep grid needs an odd number of points >= 3");
  }
  const std::size_t half = points / 2;
  std::vector<double> grid(points);
  for (std::size_t k = 0; k < points; ++k) {
    grid[k] = (static_cast<double>(k) - static_cast<double>(half)) /
              static_cast<double>(half);
  }
  grid[half] = 0.0;
  return grid;
}

SweepCurve Sweep(Backend& backend, const AttributeVector& d,
                 const AuditConfig& config, std::span<const LatentCode> zs) {
  config.Validate();
  d.Validate();
  if (zs.empty()) throw InputError("sweep needs at least one code");
  CheckDisplacement(backend, d.direction);
  SweepCurve curve;
  curve.attribute = d.attribute;
  curve.grid = SweepGrid(config.grid_points);
  const std::vector<double> base = EvaluateProbabilities(backend, zs);
  for (double step : curve.grid) {
    std::vector<double> displacement(d.direction);
    for (double& v : displacement) v *= step;
    const Estimate e = PairedDifference(backend, base, displacement, zs);
    curve.values.push_back(e.value);
    curve.stderrs.push_back(e.stderr_);
  }

  const double n = static_cast<double>(curve.grid.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < curve.grid.size(); ++k) {
    mx += curve.grid[k];
    my += curve.values[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < curve.grid.size(); ++k) {
    const double dx = curve.grid[k] - mx, dy = curve.values[k] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (syy > 0.0) curve.linearity_r2 = (sxy * sxy) / (sxx * syy);
  return curve;
}

SweepCurve Sweep(Backend& backend, const AttributeVector& d,
                 const AuditConfig& config) {
  const std::vector<LatentCode> zs = SamplePrior(config, config.sample_count);
  return Sweep(backend, d, config, zs);
}

int FlipIndicator(Backend& backend, const LatentCode& z,
                  std::span<const double> displacement, double threshold) {
  CheckDisplacement(backend, displacement);
  const LatentCode moved = Traverse(z, displacement, 1.0);
  const LatentCode pair[2] = {z, moved};
  const std::vector<double> p = backend.ClassifyLatent(pair);
  return ClassifyBinary(p[0], threshold) != ClassifyBinary(p[1], threshold);
}

FlipReport FlipRates(Backend& backend, std::string attribute,
                     std::span<const double> displacement,
                     std::span<const LatentCode> zs, double threshold) {
  if (zs.empty()) throw InputError("flip rates need at least one code");
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw InputError("threshold must lie in [0,1]");
  }
  CheckDisplacement(backend, displacement);
  const std::vector<double> base = EvaluateProbabilities(backend, zs);
  std::vector<double> moved = base;
  if (!IsZero(displacement)) {
    moved = EvaluateProbabilities(backend, Displaced(zs, displacement));
  }
  FlipReport r;
  r.attribute = std::move(attribute);
  std::size_t flips[2] = {0, 0};
  for (std::size_t k = 0; k < zs.size(); ++k) {
    const int y0 = ClassifyBinary(base[k], threshold);
    const int y1 = ClassifyBinary(moved[k], threshold);
    (y0 == 1 ? r.n_positive_base : r.n_negative_base) += 1;
    flips[y0] += y0 != y1;
  }
  if (r.n_positive_base > 0) {
    r.s_1to0 = static_cast<double>(flips[1]) /
               static_cast<double>(r.n_positive_base);
  }
  if (r.n_negative_base > 0) {
    r.s_0to1 = static_cast<double>(flips[0]) /
               static_cast<double>(r.n_negative_base);
  }
  return r;
}

FlipReport FlipRates(Backend& backend, const AttributeVector& d,
                     std::span<const LatentCode> zs, double threshold,
                     double step) {
  std::vector<double> displacement(d.direction);
  for (double& v : displacement) v *= step;
  return FlipRates(backend, d.attribute, displacement, zs, threshold);
}

double InterpolationConsistency(Backend& backend,
                                std::span<const LatentCode> zs, int label,
                                std::size_t pairs, double threshold,
                                std::uint64_t seed) {
  if (zs.size() < 2) {
    throw InputError("interpolation check needs at least two codes");
  }
  if (pairs == 0) throw InputError("interpolation check needs pairs >= 1");
  if (label != 0 && label != 1) throw InputError("label must be 0 or 1");
  Rng rng(seed, "interpolation");
  std::vector<LatentCode> points;
  points.reserve(pairs);
  for (std::size_t p = 0; p < pairs; ++p) {
    const std::size_t a = rng.UniformIndex(zs.size());
    std::size_t b = rng.UniformIndex(zs.size() - 1);
    if (b >= a) ++b;
    const double t = rng.Uniform01();
    std::vector<double> v(zs[a].values);
    for (std::size_t k = 0; k < v.size(); ++k) {
      v[k] += t * (zs[b][k] - zs[a][k]);
    }
    points.emplace_back(std::move(v));
  }
  const std::vector<double> probs = EvaluateProbabilities(backend, points);
  std::size_t kept = 0;
  for (double p : probs) kept += ClassifyBinary(p, threshold) == label;
  return static_cast<double>(kept) / static_cast<double>(pairs);
}

std::string SweepCsv(const SweepCurve& curve) {
  std::string out = "i,s_f,stderr\n";
  for (std::size_t k = 0; k < curve.grid.size(); ++k) {
    out += FormatNumber(curve.grid[k], "%.6f") + "," +
           FormatNumber(curve.values[k], "%.12g") + "," +
           FormatNumber(curve.stderrs[k], "%.12g") + "\n";
  }
  return out;
}

json SweepToJson(const SweepCurve& curve) {
  return json{{"attribute", curve.attribute},
              {"grid", curve.grid},
              {"values", curve.values},
              {"stderr", curve.stderrs},
              {"linearity_r2", OptionalJson(curve.linearity_r2)}};
}

std::string FlipCsv(std::span<const FlipReport> reports) {
  std::string out = "attribute,s_1to0,s_0to1\n";
  for (const FlipReport& r : reports) {
    out += r.attribute + "," + FormatRate(r.s_1to0) + "," +
           FormatRate(r.s_0to1) + "\n";
  }
  return out;
}

json FlipToJson(const FlipReport& r) {
  return json{{"attribute", r.attribute},
              {"s_1to0", OptionalJson(r.s_1to0)},
              {"s_0to1", OptionalJson(r.s_0to1)},
              {"n_positive_base", r.n_positive_base},
              {"n_negative_base", r.n_negative_base}};
}

}  // namespace cfaudit
