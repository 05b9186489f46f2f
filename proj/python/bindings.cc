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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <sstream>

#include "cfaudit/attrvec/probe.h"
#include "cfaudit/backends/factory.h"
#include "cfaudit/backends/oracle_backend.h"
#include "cfaudit/cli/commands.h"
#include "cfaudit/core/config.h"
#include "cfaudit/core/errors.h"
#include "cfaudit/core/latent.h"
#include "cfaudit/metrics/sensitivity.h"
#include "cfaudit/stats/stats.h"

namespace py = pybind11;
using namespace cfaudit;

namespace {

using Rows = std::vector<std::vector<double>>;

std::vector<LatentCode> ToCodes(const Rows& rows) {
  std::vector<LatentCode> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.emplace_back(r);
  return out;
}

Rows FromCodes(const std::vector<LatentCode>& codes) {
  Rows out;
  out.reserve(codes.size());
  for (const auto& c : codes) out.push_back(c.values);
  return out;
}

// Images travel as flat rows; the backend's image_shape gives their layout.
std::vector<ImageTensor> ToImages(Backend& b, const Rows& rows) {
  std::vector<ImageTensor> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.emplace_back(b.descriptor().image_shape, r);
  return out;
}

// {"id": str, "z": [float], "attrs": {str: int}}
std::vector<LatentRecord> ToRecords(const py::list& items) {
  std::vector<LatentRecord> out;
  for (const auto& item : items) {
    const auto d = item.cast<py::dict>();
    LatentRecord r;
    r.id = d["id"].cast<std::string>();
    r.z = LatentCode(d["z"].cast<std::vector<double>>());
    r.attrs = d["attrs"].cast<std::map<std::string, int>>();
    out.push_back(std::move(r));
  }
  return out;
}

py::object ParseJson(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

py::dict FlipDict(const FlipReport& r) {
  py::dict d;
  d["attribute"] = r.attribute;
  d["s_1to0"] = r.s_1to0;
  d["s_0to1"] = r.s_0to1;
  d["n_positive_base"] = r.n_positive_base;
  d["n_negative_base"] = r.n_negative_base;
  return d;
}

}  // namespace

PYBIND11_MODULE(cfaudit, m) {
  m.doc() = "Counterfactual attribute-sensitivity audits through a latent space";
  m.attr("__version__") = cli::kVersion;

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InputError>(m, "InputError", error);
  py::register_exception<DimensionError>(m, "DimensionError", error);
  py::register_exception<BackendError>(m, "BackendError", error);
  py::register_exception<UnsupportedError>(m, "UnsupportedError", error);
  py::register_exception<BalanceError>(m, "BalanceError", error);
  py::register_exception<FitError>(m, "FitError", error);
  py::register_exception<DuplicateError>(m, "DuplicateError", error);
  py::register_exception<GuardrailError>(m, "GuardrailError", error);

  py::class_<AuditConfig>(m, "AuditConfig")
      .def(py::init<>())
      .def_readwrite("seed", &AuditConfig::seed)
      .def_readwrite("latent_dim", &AuditConfig::latent_dim)
      .def_readwrite("threshold_c", &AuditConfig::threshold_c)
      .def_readwrite("grid_points", &AuditConfig::grid_points)
      .def_readwrite("samples_per_class", &AuditConfig::samples_per_class)
      .def_readwrite("train_fraction", &AuditConfig::train_fraction)
      .def_readwrite("balance_attributes", &AuditConfig::balance_attributes)
      .def_readwrite("blocked_attributes", &AuditConfig::blocked_attributes)
      .def_readwrite("sample_count", &AuditConfig::sample_count)
      .def("validate", &AuditConfig::Validate)
      .def("is_blocked", &AuditConfig::IsBlocked)
      .def("hash", &AuditConfig::Hash)
      .def("to_json", [](const AuditConfig& c) { return c.ToJson().dump(); })
      .def_static("from_json", [](const std::string& s) {
        return AuditConfig::FromJson(nlohmann::json::parse(s));
      })
      .def_static("load", [](const std::string& path) { return AuditConfig::Load(path); });

  py::class_<Backend, std::shared_ptr<Backend>>(m, "Backend")
      .def_property_readonly("latent_dim", [](Backend& b) { return b.descriptor().latent_dim; })
      .def_property_readonly("image_shape", [](Backend& b) { return b.descriptor().image_shape; })
      .def_property_readonly("has_encoder", [](Backend& b) { return b.descriptor().has_encoder; })
      .def("generate", [](Backend& b, const Rows& zs) {
        const auto codes = ToCodes(zs);
        Rows out;
        for (auto& x : b.Generate(codes)) out.push_back(std::move(x.values));
        return out;
      })
      .def("encode", [](Backend& b, const Rows& xs) {
        return FromCodes(b.Encode(ToImages(b, xs)));
      })
      .def("classify_prob", [](Backend& b, const Rows& xs) {
        return b.ClassifyProb(ToImages(b, xs));
      })
      .def("classify_latent", [](Backend& b, const Rows& zs) {
        return b.ClassifyLatent(ToCodes(zs));
      })
      .def("reconstruction_error", [](Backend& b, const Rows& zs) {
        return ReconstructionDiagnostic(b, ToCodes(zs));
      });

  py::class_<OracleBackend, Backend, std::shared_ptr<OracleBackend>>(m, "OracleBackend")
      .def(py::init([](const std::string& spec_json) {
             return std::make_shared<OracleBackend>(
                 SyntheticOracleSpec::FromJson(nlohmann::json::parse(spec_json)));
           }),
           py::arg("spec_json"))
      .def_static("load", [](const std::string& path) {
        return std::make_shared<OracleBackend>(SyntheticOracleSpec::Load(path));
      })
      .def("spec_json", [](const OracleBackend& b) { return b.spec().ToJson().dump(); })
      .def("ground_truth_sensitivity",
           [](const OracleBackend& b, const std::vector<double>& d, double step,
              std::size_t n, std::uint64_t seed) {
             return OracleGroundTruthSensitivity(b.spec(), d, step, n, seed);
           },
           py::arg("direction"), py::arg("step"), py::arg("n"), py::arg("seed"));

  m.def("random_oracle",
        [](std::uint64_t seed, std::size_t latent_dim, std::size_t image_dim,
           std::vector<std::string> attributes, std::string classifier_attribute,
           double classifier_scale, std::string bias_attribute, double gamma) {
          RandomOracleOptions o;
          o.seed = seed;
          o.latent_dim = latent_dim;
          o.image_dim = image_dim;
          o.attributes = std::move(attributes);
          o.classifier_attribute = std::move(classifier_attribute);
          o.classifier_scale = classifier_scale;
          o.bias_attribute = std::move(bias_attribute);
          o.gamma = gamma;
          return std::make_shared<OracleBackend>(RandomOracleSpec(o));
        },
        py::arg("seed") = 0, py::arg("latent_dim") = 8, py::arg("image_dim") = 16,
        py::arg("attributes") = std::vector<std::string>{"Smiling", "Young"},
        py::arg("classifier_attribute") = "Smiling", py::arg("classifier_scale") = 2.0,
        py::arg("bias_attribute") = "", py::arg("gamma") = 0.0);

  m.def("open_backend",
        [](const std::string& locator) -> std::shared_ptr<Backend> {
          return OpenBackend(locator);
        },
        py::arg("locator"));

  m.def("sample_prior",
        [](std::uint64_t seed, std::size_t n, std::size_t dim) {
          return FromCodes(SamplePrior(seed, n, dim));
        },
        py::arg("seed"), py::arg("n"), py::arg("dim"));

  m.def("sensitivity_continuous",
        [](Backend& b, const std::vector<double>& displacement, const Rows& zs) {
          const Estimate e = SensitivityContinuous(b, displacement, ToCodes(zs));
          return py::make_tuple(e.value, e.stderr_);
        },
        py::arg("backend"), py::arg("displacement"), py::arg("zs"),
        "Paired Monte Carlo mean of f(G(z + d)) - f(G(z)); returns (value, stderr).");

  m.def("sweep",
        [](Backend& b, const std::string& attribute, const std::vector<double>& direction,
           const AuditConfig& config, std::optional<Rows> zs) {
          const auto d = AttributeVector::FromDirection(attribute, direction);
          const SweepCurve c = zs ? Sweep(b, d, config, ToCodes(*zs)) : Sweep(b, d, config);
          return ParseJson(SweepToJson(c));
        },
        py::arg("backend"), py::arg("attribute"), py::arg("direction"), py::arg("config"),
        py::arg("zs") = py::none());

  m.def("flip_rates",
        [](Backend& b, const std::string& attribute, const std::vector<double>& displacement,
           const Rows& zs, double c) {
          return FlipDict(FlipRates(b, attribute, displacement, ToCodes(zs), c));
        },
        py::arg("backend"), py::arg("attribute"), py::arg("displacement"), py::arg("zs"),
        py::arg("threshold") = 0.5);

  m.def("interpolation_consistency",
        [](Backend& b, const Rows& zs, int label, std::size_t pairs, double c,
           std::uint64_t seed) {
          return InterpolationConsistency(b, ToCodes(zs), label, pairs, c, seed);
        },
        py::arg("backend"), py::arg("zs"), py::arg("label"), py::arg("pairs") = 1000,
        py::arg("threshold") = 0.5, py::arg("seed") = 0);

  m.def("balance_records",
        [](const py::list& records, const std::string& target,
           const std::vector<std::string>& confounds, std::uint64_t seed,
           std::optional<std::size_t> max_per_cell) {
          std::vector<std::string> ids;
          for (const auto& r : BalanceRecords(ToRecords(records), target, confounds, seed,
                                              max_per_cell)) {
            ids.push_back(r.id);
          }
          return ids;
        },
        py::arg("records"), py::arg("target"), py::arg("confounds"), py::arg("seed") = 0,
        py::arg("max_per_cell") = py::none(), "Ids of the balanced subset, sorted.");

  m.def("fit_linear_probe",
        [](const py::list& records, const std::string& target, const AuditConfig& config) {
          const ProbeFit fit = FitLinearProbe(ToRecords(records), target, config);
          py::dict d;
          d["attribute"] = fit.vector.attribute;
          d["direction"] = fit.vector.direction;
          d["test_accuracy"] = fit.report.test_accuracy;
          d["train_count"] = fit.report.train_count;
          d["test_count"] = fit.report.test_count;
          d["iterations"] = fit.report.iterations_run;
          d["converged"] = fit.report.converged;
          d["warning"] = fit.report.warning;
          return d;
        },
        py::arg("records"), py::arg("target"), py::arg("config"));

  m.def("correlation_matrix",
        [](const py::list& records, const std::vector<std::string>& attrs) {
          return ComputeCorrelationMatrix(ToRecords(records), attrs).values;
        },
        py::arg("records"), py::arg("attrs"), "Phi coefficients; None where undefined.");

  m.def("disaggregated_eval",
        [](const std::vector<int>& truth, const std::vector<int>& predicted,
           const std::vector<std::pair<std::string, std::vector<std::size_t>>>& slices) {
          if (truth.size() != predicted.size()) {
            throw DimensionError("truth and predicted differ in length");
          }
          std::vector<LabelPair> pairs;
          for (std::size_t k = 0; k < truth.size(); ++k) pairs.push_back({truth[k], predicted[k]});
          const auto rows = DisaggregatedEval(pairs, slices);
          return py::make_tuple(ParseJson(DisaggregatedToJson(rows)), DisaggregatedCsv(rows));
        },
        py::arg("truth"), py::arg("predicted"),
        py::arg("slices") = std::vector<std::pair<std::string, std::vector<std::size_t>>>{},
        "Returns (rows, csv) with a leading Total row.");

  m.def("run_cli",
        [](std::vector<std::string> args) {
          args.insert(args.begin(), "cfaudit");
          std::ostringstream out, err;
          int code;
          {
            py::gil_scoped_release release;
            code = cli::RunCli(args, out, err);
          }
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command line; returns (exit_code, stdout, stderr).");
}
