// Copyright 2026 The shuffledp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Python bindings. Parameter structs are exposed as read-only classes with a
// to_dict(); reports come back as plain dicts in the same shape as the CLI's
// JSON output.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shuffledp/bib.h"
#include "shuffledp/errors.h"
#include "shuffledp/fe.h"
#include "shuffledp/hhd.h"
#include "shuffledp/params.h"
#include "shuffledp/report_io.h"
#include "shuffledp/sim.h"
#include "shuffledp/wire.h"

namespace py = pybind11;

namespace shuffledp {
namespace {

py::object ToPython(const Json& doc) {
  return py::module_::import("json").attr("loads")(doc.dump());
}

double DefaultDelta(std::uint64_t n) {
  return 1.0 / (static_cast<double>(n) * static_cast<double>(n));
}

FEParams PyDeriveFEParams(const std::string& variant, std::uint64_t n,
                          std::uint64_t domain, std::optional<std::uint64_t> b,
                          double epsilon, std::optional<double> delta,
                          double gamma_robust) {
  const Variant v = ParseVariant(variant);
  const std::uint64_t bins =
      v == Variant::kFE0 ? domain : b.value_or(DefaultNumBins(n));
  return DeriveFEParams(v, n, domain, bins, epsilon,
                        delta.value_or(DefaultDelta(n)), gamma_robust);
}

ExperimentOptions Options(std::uint64_t trials, std::uint64_t seed, int threads,
                          double beta) {
  ExperimentOptions options;
  options.trials = trials;
  options.seed = seed;
  options.threads = threads;
  options.beta = beta;
  return options;
}

std::vector<double> Estimates(const std::vector<FrequencyEstimate>& all) {
  std::vector<double> out;
  out.reserve(all.size());
  for (const FrequencyEstimate& e : all) out.push_back(e.g_hat);
  return out;
}

py::bytes ToBytes(const std::vector<std::uint8_t>& data) {
  return py::bytes(reinterpret_cast<const char*>(data.data()), data.size());
}

std::vector<std::uint8_t> FromBytes(const py::bytes& data) {
  const std::string s = data;
  return std::vector<std::uint8_t>(s.begin(), s.end());
}

}  // namespace
}  // namespace shuffledp

PYBIND11_MODULE(_core, m) {
  using namespace shuffledp;
  m.doc() = "Shuffle-model differentially private frequency estimation";

  py::register_exception<InvalidParameterError>(m, "InvalidParameterError",
                                                PyExc_ValueError);
  py::register_exception<InvalidInputError>(m, "InvalidInputError",
                                            PyExc_ValueError);

  m.attr("DEFAULT_SEED") = kDefaultSeed;

  py::class_<FEParams>(m, "FEParams")
      .def_property_readonly("variant", [](const FEParams& p) {
        return std::string(VariantName(p.variant));
      })
      .def_readonly("n", &FEParams::num_users)
      .def_readonly("B", &FEParams::domain_size)
      .def_readonly("b", &FEParams::num_bins)
      .def_readonly("q", &FEParams::prime)
      .def_readonly("rho", &FEParams::rho)
      .def_readonly("p_col", &FEParams::p_col)
      .def_readonly("epsilon", &FEParams::epsilon)
      .def_readonly("delta", &FEParams::delta)
      .def_readonly("gamma_robust", &FEParams::gamma_robust)
      .def("to_dict", [](const FEParams& p) { return ToPython(ToJson(p)); })
      .def("__repr__", [](const FEParams& p) {
        return "FEParams(" + ToJson(p).dump() + ")";
      });

  py::class_<HHDParams>(m, "HHDParams")
      .def_readonly("n", &HHDParams::num_users)
      .def_readonly("B", &HHDParams::domain_size)
      .def_readonly("b", &HHDParams::num_bins)
      .def_readonly("q_sub", &HHDParams::q_sub)
      .def_readonly("prune_threshold", &HHDParams::prune_threshold)
      .def_readonly("report_threshold", &HHDParams::report_threshold)
      .def_readonly("levels", &HHDParams::levels)
      .def_readonly("warnings", &HHDParams::warnings)
      .def("to_dict", [](const HHDParams& p) { return ToPython(ToJson(p)); });

  py::class_<BIBParams>(m, "BIBParams")
      .def(py::init([](std::uint64_t m_, std::uint64_t s, std::uint64_t k,
                       std::uint64_t n, double p) {
             BIBParams params{m_, s, k, n, p};
             ValidateBIBParams(params);
             return params;
           }),
           py::arg("m"), py::arg("s"), py::arg("k"), py::arg("n"), py::arg("p"))
      .def_readonly("m", &BIBParams::m)
      .def_readonly("s", &BIBParams::s)
      .def_readonly("k", &BIBParams::k)
      .def_readonly("n", &BIBParams::n)
      .def_readonly("p", &BIBParams::p)
      .def("to_dict", [](const BIBParams& p) { return ToPython(ToJson(p)); });

  py::class_<Dataset>(m, "Dataset")
      .def_readonly("values", &Dataset::values)
      .def_readonly("B", &Dataset::domain_size)
      .def_readonly("spec", &Dataset::spec)
      .def_readonly("seed", &Dataset::seed)
      .def("__len__", [](const Dataset& d) { return d.values.size(); })
      .def("to_bytes", [](const Dataset& d) { return ToBytes(EncodeDataset(d)); })
      .def_static("from_bytes", [](const py::bytes& data) {
        return DecodeDataset(FromBytes(data));
      });

  // Parameters
  m.def("smallest_prime_geq", &SmallestPrimeGeq, py::arg("value"));
  m.def("collision_probability", &CollisionProbability, py::arg("q"),
        py::arg("b"));
  m.def("default_num_bins", &DefaultNumBins, py::arg("n"));
  m.def("derive_fe_params", &PyDeriveFEParams, py::arg("variant"),
        py::arg("n"), py::arg("B"), py::arg("b") = py::none(),
        py::arg("epsilon") = 1.0, py::arg("delta") = py::none(),
        py::arg("gamma_robust") = 1.0,
        "Derive FE0/FE1 constants; b defaults to max(2, floor(n/ln^2 n)) and "
        "delta to 1/n^2.");
  m.def("error_bound_alpha", &ErrorBoundAlpha, py::arg("params"),
        py::arg("beta") = 0.1);
  m.def(
      "derive_hhd_params",
      [](std::uint64_t n, std::uint64_t domain, std::optional<std::uint64_t> b,
         double epsilon, std::optional<double> delta, double phi,
         double gamma_hh, double c_sub, double gamma_robust) {
        return DeriveHHDParams(n, domain, b.value_or(DefaultNumBins(n)),
                               epsilon, delta.value_or(DefaultDelta(n)), phi,
                               gamma_hh, c_sub, gamma_robust);
      },
      py::arg("n"), py::arg("B"), py::arg("b") = py::none(),
      py::arg("epsilon") = 1.0, py::arg("delta") = py::none(),
      py::arg("phi") = 0.05, py::arg("gamma_hh") = 0.1,
      py::arg("c_sub") = kDefaultSubsamplingConstant,
      py::arg("gamma_robust") = 1.0);

  // Hashing
  m.def("hash_eval", &HashEval, py::arg("u"), py::arg("v"), py::arg("x"),
        py::arg("q"), py::arg("b"));
  m.def("enumerate_preimages", &EnumeratePreimages, py::arg("u"), py::arg("v"),
        py::arg("w"), py::arg("q"), py::arg("b"), py::arg("B"));

  // Balls into bins
  m.def("privacy_condition_holds", &CheckPrivacyCondition, py::arg("params"),
        py::arg("epsilon"), py::arg("delta"));
  m.def("exact_privacy_failure", &ExactPrivacyFailure, py::arg("params"),
        py::arg("epsilon"));
  m.def(
      "audit_bib",
      [](const BIBParams& params, double epsilon, double delta,
         const std::string& mode, std::uint64_t trials, std::uint64_t seed,
         int threads) {
        if (mode == "exact") {
          return ToPython(ToJson(ExactPrivacyAudit(params, epsilon, delta)));
        }
        if (mode == "monte-carlo") {
          return ToPython(ToJson(MonteCarloInequality(params, epsilon, delta,
                                                      trials, seed, threads)));
        }
        throw InvalidParameterError("mode must be 'exact' or 'monte-carlo'");
      },
      py::arg("params"), py::arg("epsilon"), py::arg("delta"),
      py::arg("mode") = "exact", py::arg("trials") = 100000,
      py::arg("seed") = kDefaultSeed, py::arg("threads") = 1);
  m.def(
      "audit_mechanism",
      [](const BIBParams& params, const std::vector<std::uint64_t>& special,
         const std::vector<std::uint64_t>& neighbor, double epsilon,
         double delta, std::uint64_t trials, std::uint64_t seed, int threads) {
        return ToPython(ToJson(MonteCarloPrivacyLoss(
            params, special, neighbor, epsilon, delta, trials, seed, threads)));
      },
      py::arg("params"), py::arg("special"), py::arg("neighbor"),
      py::arg("epsilon"), py::arg("delta"), py::arg("trials") = 100000,
      py::arg("seed") = kDefaultSeed, py::arg("threads") = 1);

  // Datasets
  m.def(
      "generate_dataset",
      [](const std::string& spec, std::uint64_t n, std::uint64_t domain,
         std::uint64_t seed) {
        return GenerateDataset(ParseDatasetSpec(spec), n, domain, seed);
      },
      py::arg("spec"), py::arg("n"), py::arg("B"),
      py::arg("seed") = kDefaultSeed);
  m.def("true_frequencies", &TrueFrequencies, py::arg("dataset"));

  // Protocol runs
  m.def(
      "estimate_frequencies",
      [](const Dataset& data, const FEParams& params, std::uint64_t seed,
         std::uint64_t trial) {
        py::gil_scoped_release release;
        if (params.variant == Variant::kFE0) {
          return Estimates(
              AnalyzeFE0All(SimulateFE0Bag(data, params, seed, trial), params));
        }
        return Estimates(
            AnalyzeFE1All(SimulateFE1Bag(data, params, seed, trial), params));
      },
      py::arg("dataset"), py::arg("params"), py::arg("seed") = kDefaultSeed,
      py::arg("trial") = 0,
      "One randomize/shuffle/analyze run; index i holds the estimate of i+1.");
  m.def(
      "encode_bag",
      [](const Dataset& data, const FEParams& params, std::uint64_t seed) {
        return ToBytes(params.variant == Variant::kFE0
                           ? EncodeBag(SimulateFE0Bag(data, params, seed), params)
                           : EncodeBag(SimulateFE1Bag(data, params, seed), params));
      },
      py::arg("dataset"), py::arg("params"), py::arg("seed") = kDefaultSeed);
  m.def(
      "run_fe",
      [](const Dataset& data, const FEParams& params, std::uint64_t trials,
         std::uint64_t seed, int threads, double beta) {
        ErrorReport report;
        {
          py::gil_scoped_release release;
          report = RunFEExperiment(data, params,
                                   Options(trials, seed, threads, beta));
        }
        return ToPython(ToJson(report));
      },
      py::arg("dataset"), py::arg("params"), py::arg("trials") = 1,
      py::arg("seed") = kDefaultSeed, py::arg("threads") = 1,
      py::arg("beta") = 0.1);
  m.def(
      "detect_heavy_hitters",
      [](const Dataset& data, const HHDParams& params, std::uint64_t seed,
         std::uint64_t trial) {
        py::gil_scoped_release release;
        return AnalyzeHHD(SimulateHHDBag(data, params, seed, trial), params);
      },
      py::arg("dataset"), py::arg("params"), py::arg("seed") = kDefaultSeed,
      py::arg("trial") = 0);
  m.def(
      "run_hhd",
      [](const Dataset& data, const HHDParams& params, std::uint64_t trials,
         std::uint64_t seed, int threads) {
        RecallReport report;
        {
          py::gil_scoped_release release;
          report = RunHHDExperiment(data, params,
                                    Options(trials, seed, threads, 0.1));
        }
        return ToPython(ToJson(report));
      },
      py::arg("dataset"), py::arg("params"), py::arg("trials") = 1,
      py::arg("seed") = kDefaultSeed, py::arg("threads") = 1);
}
