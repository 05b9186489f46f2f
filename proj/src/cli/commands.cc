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

#include "cfaudit/cli/commands.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "cfaudit/attrvec/io.h"
#include "cfaudit/attrvec/probe.h"
#include "cfaudit/backends/factory.h"
#include "cfaudit/backends/oracle_backend.h"
#include "cfaudit/core/config.h"
#include "cfaudit/core/errors.h"
#include "cfaudit/core/latent.h"
#include "cfaudit/core/rng.h"
#include "cfaudit/metrics/sensitivity.h"
#include "cfaudit/stats/stats.h"

namespace cfaudit::cli {

namespace fs = std::filesystem;
using nlohmann::json;

int ExitCodeFor(const std::exception& e) {
  if (dynamic_cast<const GuardrailError*>(&e)) return kExitGuardrail;
  if (dynamic_cast<const BackendError*>(&e)) return kExitBackend;
  return kExitInput;
}

namespace {

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string backend;
  bool overwrite = false;
};

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Tracks everything one invocation writes, and the metadata of the run.
class AuditRun {
 public:
  AuditRun(std::string command, const GlobalOptions& opts)
      : command_(std::move(command)),
        opts_(opts),
        start_(std::chrono::steady_clock::now()) {
    config_ = opts.config_path.empty() ? AuditConfig()
                                       : AuditConfig::Load(opts.config_path);
    if (opts.seed) config_.seed = *opts.seed;
    config_.Validate();
  }

  const AuditConfig& config() const { return config_; }

  void CheckNotBlocked(const std::string& attribute) const {
    if (config_.IsBlocked(attribute)) {
      throw GuardrailError(
          "refusing to manipulate blocked attribute '" + attribute +
          "' (listed in blocked_attributes of " +
          (opts_.config_path.empty() ? std::string("the default config")
                                     : "config " + opts_.config_path) +
          ")");
    }
  }

  // Must be called once, after every guardrail and input check.
  void PrepareOutput() {
    if (opts_.out_dir.empty()) throw InputError("--out is required");
    out_ = opts_.out_dir;
    if (fs::exists(out_) && !fs::is_directory(out_)) {
      throw InputError("output path '" + out_.string() +
                       "' exists and is not a directory");
    }
    if (fs::exists(out_) && !fs::is_empty(out_) && !opts_.overwrite) {
      throw InputError("output directory '" + out_.string() +
                       "' is not empty; pass --overwrite to replace it");
    }
    fs::create_directories(out_);
  }

  void Write(const std::string& relative, const std::string& content) {
    const fs::path path = out_ / relative;
    fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    f << content;
    if (!f) throw InputError("cannot write '" + path.string() + "'");
    outputs_.insert(relative);
  }
  void WriteJson(const std::string& relative, const json& j) {
    Write(relative, j.dump(2) + "\n");
  }

  void SetBackend(const std::string& locator, const BackendDescriptor& d) {
    backend_ = json{{"locator", locator},
                    {"latent_dim", d.latent_dim},
                    {"image_shape", d.image_shape},
                    {"has_encoder", d.has_encoder}};
  }
  void AddVector(const AttributeVector& v) { vectors_.push_back(v.attribute); }

  // Writes run.json and reports wall-clock time on `err`; timings stay out
  // of the files so reruns are byte-identical.
  void Finish(std::ostream& err) {
    outputs_.insert("run.json");
    json run{{"command", command_},
             {"version", kVersion},
             {"config", config_.ToJson()},
             {"config_hash", config_.Hash()},
             {"seed", config_.seed},
             {"backend", backend_},
             {"attribute_vectors", vectors_},
             {"outputs", std::vector<std::string>(outputs_.begin(),
                                                  outputs_.end())}};
    std::ofstream f(out_ / "run.json", std::ios::binary);
    f << run.dump(2) << "\n";
    const double ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start_)
                          .count();
    err << "cfaudit " << command_ << ": wrote " << outputs_.size()
        << " files to " << out_.string() << " in " << std::lround(ms)
        << " ms\n";
  }

 private:
  std::string command_;
  GlobalOptions opts_;
  AuditConfig config_;
  fs::path out_;
  json backend_ = nullptr;
  std::vector<std::string> vectors_;
  std::set<std::string> outputs_;
  std::chrono::steady_clock::time_point start_;
};

std::unique_ptr<Backend> OpenCheckedBackend(AuditRun& run,
                                            const std::string& locator) {
  if (locator.empty()) throw InputError("--backend is required");
  std::unique_ptr<Backend> backend = OpenBackend(locator);
  const BackendDescriptor& d = backend->descriptor();
  if (d.latent_dim != run.config().latent_dim) {
    throw DimensionError("backend latent_dim " + std::to_string(d.latent_dim) +
                         " does not match config latent_dim " +
                         std::to_string(run.config().latent_dim));
  }
  run.SetBackend(locator, d);
  return backend;
}

void CheckVectorDims(std::span<const AttributeVector> vectors,
                     std::size_t latent_dim) {
  for (const AttributeVector& v : vectors) {
    if (v.dim() != latent_dim) {
      throw DimensionError("attribute vector '" + v.attribute + "' has dim " +
                           std::to_string(v.dim()) + ", backend expects " +
                           std::to_string(latent_dim));
    }
  }
}

std::string SafeName(const std::string& attribute) {
  std::string s = attribute;
  for (char& c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') {
      c = '_';
    }
  }
  return s;
}

json OptionalJson(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

// ---- estimate-attrs --------------------------------------------------------

struct EstimateOptions {
  std::string records;
  std::string attrs;
};

void CmdEstimateAttrs(const GlobalOptions& g, const EstimateOptions& o,
                      std::ostream& err) {
  AuditRun run("estimate-attrs", g);
  const AuditConfig& config = run.config();
  std::vector<std::string> requested = SplitList(o.attrs);
  for (const auto& a : requested) run.CheckNotBlocked(a);

  if (o.records.empty()) throw InputError("--records is required");
  const std::vector<LatentRecord> records = LoadRecords(o.records);
  if (records.empty()) throw InputError("records file holds no records");
  for (const LatentRecord& r : records) {
    if (r.z.size() != config.latent_dim) {
      throw DimensionError("record '" + r.id + "' has latent dim " +
                           std::to_string(r.z.size()) + ", config expects " +
                           std::to_string(config.latent_dim));
    }
  }
  if (requested.empty()) {
    for (const auto& [name, label] : records.front().attrs) {
      if (!config.IsBlocked(name)) requested.push_back(name);
    }
  }
  std::sort(requested.begin(), requested.end());
  requested.erase(std::unique(requested.begin(), requested.end()),
                  requested.end());

  run.PrepareOutput();
  std::vector<ProbeFit> fits;
  json reports = json::array();
  for (const std::string& attr : requested) {
    std::vector<std::string> confounds;
    for (const auto& c : config.balance_attributes) {
      if (c != attr) confounds.push_back(c);
    }
    // Cap each joint cell so a class holds at most samples_per_class codes.
    const std::size_t cells = std::size_t{1} << confounds.size();
    const std::size_t cap = std::max<std::size_t>(1, config.samples_per_class / cells);
    const std::vector<LatentRecord> balanced =
        BalanceRecords(records, attr, confounds, config.seed, cap);
    ProbeFit fit = FitLinearProbe(balanced, attr, config);
    if (fit.report.imbalance_warning) {
      err << "warning: " << attr << ": " << fit.report.warning << "\n";
    }
    if (!fit.report.converged) {
      err << "warning: " << attr << ": probe did not converge in "
          << fit.report.iterations_run << " iterations\n";
    }
    run.WriteJson("vectors/" + SafeName(attr) + ".json",
                  AttributeVectorToJson(fit.vector, config.seed));
    run.AddVector(fit.vector);
    reports.push_back({{"attribute", attr},
                       {"train_count", fit.report.train_count},
                       {"test_count", fit.report.test_count},
                       {"test_accuracy", fit.report.test_accuracy},
                       {"iterations_run", fit.report.iterations_run},
                       {"final_loss", fit.report.final_loss},
                       {"converged", fit.report.converged},
                       {"imbalance_warning", fit.report.imbalance_warning}});
    fits.push_back(std::move(fit));
  }
  run.Write("probe_accuracy.csv", ProbeAccuracyCsv(ProbeAccuracyReport(fits)));
  run.WriteJson("probe_report.json", reports);
  run.Finish(err);
}

// ---- audit / sweep / flip-report / interp-check ---------------------------

struct AuditOptions {
  std::string vectors;
  std::string vector;
  std::size_t pairs = 1000;
};

std::vector<AttributeVector> GuardedVectors(AuditRun& run,
                                            const AuditOptions& o) {
  std::vector<AttributeVector> vectors;
  if (!o.vector.empty()) vectors.push_back(LoadAttributeVector(o.vector));
  if (!o.vectors.empty()) {
    for (auto& v : LoadAttributeVectors(o.vectors)) vectors.push_back(v);
  }
  if (vectors.empty()) throw InputError("no attribute vectors given");
  std::set<std::string> seen;
  for (const auto& v : vectors) {
    run.CheckNotBlocked(v.attribute);
    if (!seen.insert(v.attribute).second) {
      throw DuplicateError("attribute '" + v.attribute + "' given twice");
    }
  }
  return vectors;
}

json InterpolationSummary(Backend& backend, std::span<const LatentCode> zs,
                          const AuditConfig& config, std::size_t pairs) {
  const std::vector<double> probs = EvaluateProbabilities(backend, zs);
  std::vector<LatentCode> by_label[2];
  for (std::size_t k = 0; k < zs.size(); ++k) {
    by_label[ClassifyBinary(probs[k], config.threshold_c)].push_back(zs[k]);
  }
  json out{{"pairs", pairs}};
  const char* names[2] = {"negative", "positive"};
  for (int label = 0; label < 2; ++label) {
    std::optional<double> frac;
    if (by_label[label].size() >= 2) {
      frac = InterpolationConsistency(backend, by_label[label], label, pairs,
                                      config.threshold_c, config.seed);
    }
    out[names[label]] = OptionalJson(frac);
    out[std::string(names[label]) + "_codes"] = by_label[label].size();
  }
  return out;
}

void CmdAudit(const GlobalOptions& g, const AuditOptions& o, std::ostream& err) {
  AuditRun run("audit", g);
  const AuditConfig& config = run.config();
  if (o.vectors.empty()) throw InputError("--vectors is required");
  const std::vector<AttributeVector> vectors = GuardedVectors(run, o);
  auto backend = OpenCheckedBackend(run, g.backend);
  CheckVectorDims(vectors, backend->descriptor().latent_dim);
  run.PrepareOutput();

  const std::vector<LatentCode> zs = SamplePrior(config, config.sample_count);
  std::vector<FlipReport> flips, flips_negative;
  json sweeps = json::array(), sensitivity = json::array();
  for (const AttributeVector& v : vectors) {
    run.AddVector(v);
    const SweepCurve curve = Sweep(*backend, v, config, zs);
    run.Write("sweeps/sweep_" + SafeName(v.attribute) + ".csv", SweepCsv(curve));
    sweeps.push_back(SweepToJson(curve));
    const double s_f = curve.values.back();
    const double se = curve.stderrs.back();
    sensitivity.push_back({{"attribute", v.attribute},
                           {"s_f", s_f},
                           {"stderr", se},
                           {"flagged", Flagged({s_f, se})}});
    flips.push_back(FlipRates(*backend, v, zs, config.threshold_c, 1.0));
    flips_negative.push_back(FlipRates(*backend, v, zs, config.threshold_c, -1.0));
  }
  run.Write("flips.csv", FlipCsv(flips));
  run.Write("flips_negative.csv", FlipCsv(flips_negative));

  json summary{{"sensitivity", sensitivity}, {"sweeps", sweeps}};
  json flip_json = json::array(), flip_neg_json = json::array();
  for (const auto& f : flips) flip_json.push_back(FlipToJson(f));
  for (const auto& f : flips_negative) flip_neg_json.push_back(FlipToJson(f));
  summary["flips"] = flip_json;
  summary["flips_negative"] = flip_neg_json;
  summary["interpolation_consistency"] =
      InterpolationSummary(*backend, zs, config, o.pairs);
  if (backend->descriptor().has_encoder) {
    const std::size_t n = std::min<std::size_t>(zs.size(), 1000);
    summary["reconstruction_error"] = ReconstructionDiagnostic(
        *backend, std::span<const LatentCode>(zs).first(n));
  } else {
    summary["reconstruction_error"] = nullptr;
  }
  summary["sample_count"] = config.sample_count;
  summary["threshold_c"] = config.threshold_c;
  run.WriteJson("summary.json", summary);
  run.Finish(err);
}

void CmdSweep(const GlobalOptions& g, const AuditOptions& o, std::ostream& err) {
  AuditRun run("sweep", g);
  if (o.vector.empty() && o.vectors.empty()) {
    throw InputError("--vector or --vectors is required");
  }
  const std::vector<AttributeVector> vectors = GuardedVectors(run, o);
  auto backend = OpenCheckedBackend(run, g.backend);
  CheckVectorDims(vectors, backend->descriptor().latent_dim);
  run.PrepareOutput();
  const std::vector<LatentCode> zs =
      SamplePrior(run.config(), run.config().sample_count);
  for (const AttributeVector& v : vectors) {
    run.AddVector(v);
    const SweepCurve curve = Sweep(*backend, v, run.config(), zs);
    run.Write("sweep_" + SafeName(v.attribute) + ".csv", SweepCsv(curve));
    run.WriteJson("sweep_" + SafeName(v.attribute) + ".json", SweepToJson(curve));
  }
  run.Finish(err);
}

void CmdFlipReport(const GlobalOptions& g, const AuditOptions& o,
                   std::ostream& err) {
  AuditRun run("flip-report", g);
  if (o.vector.empty() && o.vectors.empty()) {
    throw InputError("--vector or --vectors is required");
  }
  const std::vector<AttributeVector> vectors = GuardedVectors(run, o);
  auto backend = OpenCheckedBackend(run, g.backend);
  CheckVectorDims(vectors, backend->descriptor().latent_dim);
  run.PrepareOutput();
  const AuditConfig& config = run.config();
  const std::vector<LatentCode> zs = SamplePrior(config, config.sample_count);
  std::vector<FlipReport> pos, neg;
  json j = json::object();
  j["positive_step"] = json::array();
  j["negative_step"] = json::array();
  for (const AttributeVector& v : vectors) {
    run.AddVector(v);
    pos.push_back(FlipRates(*backend, v, zs, config.threshold_c, 1.0));
    neg.push_back(FlipRates(*backend, v, zs, config.threshold_c, -1.0));
    j["positive_step"].push_back(FlipToJson(pos.back()));
    j["negative_step"].push_back(FlipToJson(neg.back()));
  }
  run.Write("flips.csv", FlipCsv(pos));
  run.Write("flips_negative.csv", FlipCsv(neg));
  run.WriteJson("flips.json", j);
  run.Finish(err);
}

void CmdInterpCheck(const GlobalOptions& g, const AuditOptions& o,
                    std::ostream& err) {
  AuditRun run("interp-check", g);
  auto backend = OpenCheckedBackend(run, g.backend);
  run.PrepareOutput();
  const std::vector<LatentCode> zs =
      SamplePrior(run.config(), run.config().sample_count);
  run.WriteJson("interpolation.json",
                InterpolationSummary(*backend, zs, run.config(), o.pairs));
  run.Finish(err);
}

// ---- grid -----------------------------------------------------------------

struct GridOptions {
  std::string vector;
  std::string z_seeds = "0";
};

std::string Pgm(std::span<const double> values, std::size_t height,
                std::size_t width, double lo, double hi) {
  std::string out = "P5\n" + std::to_string(width) + " " +
                    std::to_string(height) + "\n255\n";
  for (double v : values) {
    const double scaled = hi > lo ? (v - lo) / (hi - lo) : 0.0;
    out.push_back(static_cast<char>(
        static_cast<unsigned char>(std::lround(std::clamp(scaled, 0.0, 1.0) * 255.0))));
  }
  return out;
}

void CmdGrid(const GlobalOptions& g, const GridOptions& o, std::ostream& err) {
  AuditRun run("grid", g);
  const AuditConfig& config = run.config();
  if (o.vector.empty()) throw InputError("--vector is required");
  const AttributeVector v = LoadAttributeVector(o.vector);
  run.CheckNotBlocked(v.attribute);
  std::vector<std::uint64_t> seeds;
  for (const std::string& s : SplitList(o.z_seeds)) {
    try {
      std::size_t used = 0;
      seeds.push_back(std::stoull(s, &used));
      if (used != s.size()) throw std::invalid_argument(s);
    } catch (const std::exception&) {
      throw InputError("invalid z seed '" + s + "'");
    }
  }
  if (seeds.empty()) throw InputError("--z-seeds needs at least one seed");
  auto backend = OpenCheckedBackend(run, g.backend);
  CheckVectorDims(std::span<const AttributeVector>(&v, 1),
                  backend->descriptor().latent_dim);
  run.PrepareOutput();
  run.AddVector(v);

  const std::vector<double> grid = SweepGrid(config.grid_points);
  const std::size_t centre = grid.size() / 2;
  std::vector<LatentCode> codes;
  for (std::uint64_t s : seeds) {
    const LatentCode z = SamplePrior(s, 1, config.latent_dim).front();
    for (double step : grid) codes.push_back(Traverse(z, v, step));
  }
  const std::vector<ImageTensor> images = backend->Generate(codes);
  const std::vector<double> probs = backend->ClassifyProb(images);

  const auto& shape = backend->descriptor().image_shape;
  const bool renderable = shape.size() == 2;
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& img : images) {
    for (double x : img.values) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }

  json cells = json::array();
  for (std::size_t r = 0; r < seeds.size(); ++r) {
    const int base = ClassifyBinary(probs[r * grid.size() + centre],
                                    config.threshold_c);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const std::size_t idx = r * grid.size() + k;
      const int pred = ClassifyBinary(probs[idx], config.threshold_c);
      json cell{{"seed", seeds[r]},
                {"i", grid[k]},
                {"prob", probs[idx]},
                {"pred", pred},
                {"flip", pred != base}};
      if (renderable) {
        const std::string name = "images/seed" + std::to_string(seeds[r]) +
                                 "_i" + std::to_string(k) + ".pgm";
        run.Write(name, Pgm(images[idx].values, shape[0], shape[1], lo, hi));
        cell["image"] = name;
      }
      cells.push_back(std::move(cell));
    }
  }
  run.WriteJson("manifest.json", json{{"attribute", v.attribute},
                                      {"grid", grid},
                                      {"seeds", seeds},
                                      {"threshold_c", config.threshold_c},
                                      {"cells", cells}});
  run.Finish(err);
}

// ---- corr / disagg ----------------------------------------------------------

struct CorrOptions {
  std::string records;
  std::string attrs;
};

void CmdCorr(const GlobalOptions& g, const CorrOptions& o, std::ostream& err) {
  AuditRun run("corr", g);
  if (o.records.empty()) throw InputError("--records is required");
  const std::vector<LatentRecord> records = LoadRecords(o.records);
  if (records.empty()) throw InputError("records file holds no records");
  std::vector<std::string> attrs = SplitList(o.attrs);
  if (attrs.empty()) {
    for (const auto& [name, label] : records.front().attrs) attrs.push_back(name);
  }
  const CorrelationMatrix m = ComputeCorrelationMatrix(records, attrs);
  run.PrepareOutput();
  run.Write("correlation.csv", CorrelationCsv(m));
  run.Finish(err);
}

struct DisaggOptions {
  std::string predictions;
  std::string slices;
};

// Prediction files are JSON Lines:
//   {"id": "...", "label": 0|1, "pred": 0|1, "attrs": {"Young": 1, ...}}
void CmdDisagg(const GlobalOptions& g, const DisaggOptions& o,
               std::ostream& err) {
  AuditRun run("disagg", g);
  if (o.predictions.empty()) throw InputError("--predictions is required");
  std::ifstream in(o.predictions);
  if (!in) throw InputError("cannot open predictions '" + o.predictions + "'");
  std::vector<LabelPair> pairs;
  std::vector<std::map<std::string, int>> attrs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "predictions line " + std::to_string(line_no);
    try {
      const json j = json::parse(line);
      LabelPair p{j.at("label").get<int>(), j.at("pred").get<int>()};
      if ((p.truth != 0 && p.truth != 1) || (p.predicted != 0 && p.predicted != 1)) {
        throw InputError(where + ": labels must be 0 or 1");
      }
      pairs.push_back(p);
      std::map<std::string, int> a;
      if (j.contains("attrs")) {
        for (const auto& [name, value] : j.at("attrs").items()) {
          a[name] = value.get<int>();
        }
      }
      attrs.push_back(std::move(a));
    } catch (const json::exception& e) {
      throw InputError(where + ": " + e.what());
    }
  }
  // "A" expands to A=0 and A=1; "A=v" selects one value.
  std::vector<Slice> slices;
  for (const std::string& spec : SplitList(o.slices)) {
    std::string name = spec;
    std::vector<int> values = {0, 1};
    if (auto eq = spec.find('='); eq != std::string::npos) {
      name = spec.substr(0, eq);
      const std::string value = spec.substr(eq + 1);
      if (value != "0" && value != "1") {
        throw InputError("slice '" + spec + "' must use value 0 or 1");
      }
      values = {value == "1"};
    }
    for (int value : values) {
      Slice s{name + "=" + std::to_string(value), {}};
      for (std::size_t k = 0; k < attrs.size(); ++k) {
        auto it = attrs[k].find(name);
        if (it != attrs[k].end() && it->second == value) s.second.push_back(k);
      }
      slices.push_back(std::move(s));
    }
  }
  const auto rows = DisaggregatedEval(pairs, slices);
  run.PrepareOutput();
  run.Write("disaggregated.csv", DisaggregatedCsv(rows));
  run.WriteJson("disaggregated.json", DisaggregatedToJson(rows));
  run.Finish(err);
}

// ---- oracle-gen -------------------------------------------------------------

struct OracleGenOptions {
  std::size_t latent_dim = 8;
  std::size_t image_dim = 0;
  std::string image_shape;
  std::string attrs = "Smiling,Young,Male";
  std::string classifier_attr = "Smiling";
  double classifier_scale = 2.0;
  std::string bias_attr;
  double gamma = 0.0;
  std::size_t records = 4000;
};

void CmdOracleGen(const GlobalOptions& g, const OracleGenOptions& o,
                  std::ostream& err) {
  AuditRun run("oracle-gen", g);
  RandomOracleOptions opts;
  opts.seed = run.config().seed;
  opts.latent_dim = o.latent_dim;
  std::vector<std::size_t> shape;
  if (!o.image_shape.empty()) {
    std::stringstream ss(o.image_shape);
    std::string part;
    while (std::getline(ss, part, 'x')) {
      try {
        shape.push_back(std::stoul(part));
      } catch (const std::exception&) {
        throw InputError("invalid --image-shape '" + o.image_shape + "'");
      }
    }
    opts.image_dim = ShapeProduct(shape);
  } else {
    opts.image_dim = o.image_dim ? o.image_dim : 2 * o.latent_dim;
    shape = {opts.image_dim};
  }
  opts.attributes = SplitList(o.attrs);
  opts.classifier_attribute = o.classifier_attr;
  opts.classifier_scale = o.classifier_scale;
  opts.bias_attribute = o.bias_attr;
  opts.gamma = o.gamma;
  SyntheticOracleSpec spec = RandomOracleSpec(opts);
  spec.image_shape = shape;
  spec.Validate();

  run.PrepareOutput();
  AuditConfig config = run.config();
  config.latent_dim = o.latent_dim;
  run.WriteJson("config.json", config.ToJson());
  run.WriteJson("oracle_spec.json", spec.ToJson());

  Rng rng(config.seed, "oracle-records");
  std::string lines;
  char id[32];
  for (std::size_t s = 0; s < o.records; ++s) {
    LatentRecord r;
    std::snprintf(id, sizeof(id), "r%07zu", s);
    r.id = id;
    std::vector<double> z(o.latent_dim);
    for (double& v : z) v = rng.Normal();
    for (const auto& [name, u] : spec.attributes) r.attrs[name] = Dot(u, z) > 0.0;
    r.z = LatentCode(std::move(z));
    lines += RecordToJsonLine(r) + "\n";
  }
  run.Write("records.jsonl", lines);
  run.Finish(err);
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Counterfactual attribute-sensitivity audits of binary "
               "classifiers through a generative model's latent space",
               "cfaudit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config_path, "AuditConfig JSON file");
  app.add_option("--seed", g.seed, "Seed, overriding the config");
  app.add_option("--out", g.out_dir, "Output directory");
  app.add_option("--backend", g.backend,
                 "oracle:SPEC.json | tcp:HOST:PORT | stdio:CMD");
  app.add_flag("--overwrite", g.overwrite,
               "Allow writing into a non-empty output directory");

  EstimateOptions est;
  auto* c_est = app.add_subcommand("estimate-attrs",
                                   "Fit attribute vectors from latent records");
  c_est->add_option("--records", est.records, "Latent records (JSON Lines)");
  c_est->add_option("--attrs", est.attrs, "Comma-separated attributes");

  AuditOptions aud;
  auto* c_audit = app.add_subcommand("audit", "Sweeps, flip rates and diagnostics");
  c_audit->add_option("--vectors", aud.vectors, "Directory of attribute vectors");
  c_audit->add_option("--pairs", aud.pairs, "Interpolation pairs per class");
  auto* c_sweep = app.add_subcommand("sweep", "Continuous sensitivity sweeps");
  c_sweep->add_option("--vector", aud.vector, "Attribute vector file");
  c_sweep->add_option("--vectors", aud.vectors, "Directory of attribute vectors");
  auto* c_flip = app.add_subcommand("flip-report", "Binary flip rates");
  c_flip->add_option("--vector", aud.vector, "Attribute vector file");
  c_flip->add_option("--vectors", aud.vectors, "Directory of attribute vectors");
  auto* c_interp = app.add_subcommand("interp-check",
                                      "Latent interpolation consistency check");
  c_interp->add_option("--pairs", aud.pairs, "Pairs per class");

  GridOptions grid;
  auto* c_grid = app.add_subcommand("grid", "Counterfactual image grid");
  c_grid->add_option("--vector", grid.vector, "Attribute vector file");
  c_grid->add_option("--z-seeds", grid.z_seeds, "Comma-separated seeds, one row each");

  CorrOptions corr;
  auto* c_corr = app.add_subcommand("corr", "Attribute correlation matrix");
  c_corr->add_option("--records", corr.records, "Latent records (JSON Lines)");
  c_corr->add_option("--attrs", corr.attrs, "Comma-separated attributes");

  DisaggOptions dis;
  auto* c_dis = app.add_subcommand("disagg", "Disaggregated error statistics");
  c_dis->add_option("--predictions", dis.predictions, "Predictions (JSON Lines)");
  c_dis->add_option("--slices", dis.slices, "Comma-separated slice attributes");

  OracleGenOptions og;
  auto* c_og = app.add_subcommand("oracle-gen",
                                  "Emit a synthetic oracle spec and records");
  c_og->add_option("--latent-dim", og.latent_dim, "Latent dimension");
  c_og->add_option("--image-dim", og.image_dim, "Flat image size (default 2x latent)");
  c_og->add_option("--image-shape", og.image_shape, "Image shape, e.g. 8x8");
  c_og->add_option("--attrs", og.attrs, "Comma-separated attribute names");
  c_og->add_option("--classifier-attr", og.classifier_attr, "Attribute the classifier reads");
  c_og->add_option("--classifier-scale", og.classifier_scale, "Classifier logit scale");
  c_og->add_option("--bias-attr", og.bias_attr, "Attribute to inject bias along");
  c_og->add_option("--gamma", og.gamma, "Injected bias strength");
  c_og->add_option("--records", og.records, "Number of records");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (c_est->parsed()) CmdEstimateAttrs(g, est, err);
    else if (c_audit->parsed()) CmdAudit(g, aud, err);
    else if (c_sweep->parsed()) CmdSweep(g, aud, err);
    else if (c_flip->parsed()) CmdFlipReport(g, aud, err);
    else if (c_interp->parsed()) CmdInterpCheck(g, aud, err);
    else if (c_grid->parsed()) CmdGrid(g, grid, err);
    else if (c_corr->parsed()) CmdCorr(g, corr, err);
    else if (c_dis->parsed()) CmdDisagg(g, dis, err);
    else if (c_og->parsed()) CmdOracleGen(g, og, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return ExitCodeFor(e);
  }
  return kExitOk;
}

}  // namespace cfaudit::cli
