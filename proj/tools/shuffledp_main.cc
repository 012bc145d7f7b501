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

// Command-line front end: parameter derivation, protocol experiments,
// balls-into-bins privacy audits and dataset generation.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "shuffledp/bib.h"
#include "shuffledp/errors.h"
#include "shuffledp/fe.h"
#include "shuffledp/params.h"
#include "shuffledp/report_io.h"
#include "shuffledp/sim.h"
#include "shuffledp/wire.h"

namespace shuffledp {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInvalid = 2;

struct CommonFlags {
  std::uint64_t seed = kDefaultSeed;
  bool entropy = false;
  int threads = 1;
  std::string out;
  std::string format = "json";
  bool include_timings = false;
};

struct FEFlags {
  std::string variant = "fe1";
  std::optional<std::uint64_t> n;
  std::optional<std::uint64_t> domain;
  std::optional<std::uint64_t> bins;
  double epsilon = 1.0;
  std::optional<double> delta;
  double gamma_robust = 1.0;
  double beta = 0.1;
  std::string params_file;
};

struct DatasetFlags {
  std::string spec = "uniform";
  std::string file;
};

struct HHDFlags {
  double phi = 0.05;
  double gamma_hh = 0.1;
  double c_sub = kDefaultSubsamplingConstant;
};

void AddFEFlags(CLI::App* cmd, FEFlags& f, bool with_variant, bool with_beta = true) {
  if (with_variant) {
    cmd->add_option("--variant", f.variant, "Protocol: fe0 (small domain) or fe1 (hashed)")
        ->check(CLI::IsMember({"fe0", "fe1"}))
        ->capture_default_str();
  }
  cmd->add_option("--n", f.n, "Number of users n");
  cmd->add_option("--B", f.domain, "Domain size B (elements are 1..B)");
  cmd->add_option("--b", f.bins, "Hash bins b (default: max(2, floor(n / ln^2 n)))");
  cmd->add_option("--eps", f.epsilon, "Privacy epsilon, 0 < eps <= 3; rho = 32 ln(2/delta)/(gamma eps^2) * b/n")->capture_default_str();
  cmd->add_option("--delta", f.delta, "Privacy delta (default: 1/n^2)");
  cmd->add_option("--gamma-robust", f.gamma_robust,
                  "Honest-user fraction; rho scales by 1/gamma")
      ->capture_default_str();
  if (with_beta) {
    cmd->add_option("--beta", f.beta,
                    "Failure probability of the error bound alpha")
        ->capture_default_str();
  }
}

void AddDatasetFlags(CLI::App* cmd, DatasetFlags& d) {
  cmd->add_option("--dataset", d.spec,
                  "Generated dataset: uniform | zipf:<s> | planted:<x>=<count>,...")
      ->capture_default_str();
  cmd->add_option("--dataset-file", d.file,
                  "Read the dataset from a file written by 'dataset --write'");
}

std::uint64_t Required(const std::optional<std::uint64_t>& v, const char* flag) {
  if (!v) throw InvalidParameterError(std::string(flag) + " is required");
  return *v;
}

double DefaultDelta(std::uint64_t n) {
  const double nn = static_cast<double>(n);
  return 1.0 / (nn * nn);
}

std::vector<std::uint8_t> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidParameterError("cannot open " + path);
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void WriteFile(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidParameterError("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

void Emit(const CommonFlags& common, const std::string& text) {
  if (common.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(common.out, std::ios::binary);
  if (!out) throw InvalidParameterError("cannot write " + common.out);
  out << text;
}

void EmitJson(const CommonFlags& common, const Json& doc) {
  if (common.format != "json") {
    throw InvalidParameterError("this subcommand only produces json output");
  }
  Emit(common, doc.dump(2) + "\n");
}

FEParams ResolveFEParams(const FEFlags& f) {
  if (!f.params_file.empty()) {
    const std::vector<std::uint8_t> bytes = ReadFile(f.params_file);
    Json doc;
    try {
      doc = Json::parse(bytes.begin(), bytes.end());
    } catch (const nlohmann::json::exception& e) {
      throw InvalidParameterError("cannot parse " + f.params_file + ": " + e.what());
    }
    return FEParamsFromJson(doc);
  }
  const std::uint64_t n = Required(f.n, "--n");
  const std::uint64_t domain = Required(f.domain, "--B");
  const Variant variant = ParseVariant(f.variant);
  const std::uint64_t bins = variant == Variant::kFE0
                                 ? domain
                                 : f.bins.value_or(DefaultNumBins(n));
  return DeriveFEParams(variant, n, domain, bins, f.epsilon,
                        f.delta.value_or(DefaultDelta(n)), f.gamma_robust);
}

Dataset ResolveDataset(const DatasetFlags& d, std::uint64_t n,
                       std::uint64_t domain, std::uint64_t seed) {
  if (!d.file.empty()) return DecodeDataset(ReadFile(d.file));
  return GenerateDataset(ParseDatasetSpec(d.spec), n, domain,
                         DeriveSeed(seed, kDatasetStream));
}

int Run(int argc, char** argv) {
  CLI::App app{
      "shuffledp: shuffle-model differentially private frequency estimation "
      "and heavy-hitter detection simulator"};
  app.require_subcommand(1);
  // Global options may also follow the subcommand.
  app.fallthrough();
  CommonFlags common;
  app.add_option("--seed", common.seed, "Master seed (fixed default for reproducibility)")
      ->capture_default_str();
  app.add_flag("--entropy", common.entropy,
               "Draw the master seed from std::random_device instead");
  app.add_option("--threads", common.threads, "Cap on worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--out", common.out, "Write the report here instead of stdout");
  app.add_option("--format", common.format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  app.add_flag("--include-timings", common.include_timings,
               "Add wall-clock phase timings (makes output non-reproducible)");

  // params
  FEFlags params_fe;
  std::optional<double> params_phi;
  HHDFlags params_hhd;
  CLI::App* params_cmd = app.add_subcommand(
      "params", "Derive protocol constants (q, rho, p_col, alpha) as JSON");
  AddFEFlags(params_cmd, params_fe, true);
  params_cmd->add_option("--phi", params_phi,
                         "Also derive heavy-hitter constants for this threshold");
  params_cmd->add_option("--gamma-hh", params_hhd.gamma_hh,
                         "Heavy-hitter failure probability")
      ->capture_default_str();
  params_cmd->add_option("--c-sub", params_hhd.c_sub,
                         "Subsampling constant c in q_sub = c/(phi n) ln(B/gamma_hh)")
      ->capture_default_str();

  // fe
  FEFlags fe_flags;
  DatasetFlags fe_data;
  std::uint64_t fe_trials = 1;
  bool fe_estimates = false;
  bool fe_clamp = false;
  std::string fe_bag_out;
  CLI::App* fe_cmd = app.add_subcommand(
      "fe", "Run randomize -> shuffle -> analyze trials and report max errors");
  AddFEFlags(fe_cmd, fe_flags, true);
  fe_cmd->add_option("--params", fe_flags.params_file,
                     "Read FE parameters from a JSON document written by 'params'");
  AddDatasetFlags(fe_cmd, fe_data);
  fe_cmd->add_option("--trials", fe_trials, "Independent protocol runs")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  fe_cmd->add_flag("--estimates", fe_estimates,
                   "Include per-element mean estimates over trials");
  fe_cmd->add_flag("--clamp", fe_clamp,
                   "Clamp displayed estimates to [0, n] (reports stay unclamped)");
  fe_cmd->add_option("--bag-out", fe_bag_out,
                     "Write the shuffled bag of trial 0 in the binary wire format");

  // hhd
  FEFlags hhd_fe;
  HHDFlags hhd_flags;
  DatasetFlags hhd_data;
  std::uint64_t hhd_trials = 1;
  std::string hhd_bag_out;
  CLI::App* hhd_cmd =
      app.add_subcommand("hhd", "Run prefix-tree heavy-hitter detection trials");
  AddFEFlags(hhd_cmd, hhd_fe, false, false);
  hhd_cmd->add_option("--phi", hhd_flags.phi, "Heavy-hitter threshold fraction")
      ->capture_default_str();
  hhd_cmd->add_option("--gamma-hh", hhd_flags.gamma_hh,
                      "Per-heavy-hitter failure probability")
      ->capture_default_str();
  hhd_cmd->add_option("--c-sub", hhd_flags.c_sub,
                      "Subsampling constant c in q_sub = c/(phi n) ln(B/gamma_hh)")
      ->capture_default_str();
  AddDatasetFlags(hhd_cmd, hhd_data);
  hhd_cmd->add_option("--trials", hhd_trials, "Independent protocol runs")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  hhd_cmd->add_option("--bag-out", hhd_bag_out,
                      "Write the shuffled bag of trial 0 in the binary wire format");

  // audit-bib
  BIBParams bib;
  double audit_eps = 1.0;
  double audit_delta = 1e-6;
  std::string audit_mode = "exact";
  std::string audit_kind = "mechanism";
  std::uint64_t audit_trials = 100000;
  CLI::App* audit_cmd = app.add_subcommand(
      "audit-bib", "Audit the balls-into-bins privacy inequality");
  audit_cmd->add_option("--m", bib.m, "Bins m")->capture_default_str();
  audit_cmd->add_option("--s", bib.s, "Special bins s (S = {1..s}, S' = {m-s+1..m})")
      ->capture_default_str();
  audit_cmd->add_option("--k", bib.k, "Fixed noisy balls k")->capture_default_str();
  audit_cmd->add_option("--n", bib.n, "Coins n")->capture_default_str();
  audit_cmd->add_option("--p", bib.p, "Coin bias p")->capture_default_str();
  audit_cmd->add_option("--eps", audit_eps, "Privacy epsilon")->capture_default_str();
  audit_cmd->add_option("--delta", audit_delta,
                        "Privacy delta compared against the failure probability")
      ->capture_default_str();
  audit_cmd->add_option("--mode", audit_mode, "exact (convolution) or monte-carlo")
      ->check(CLI::IsMember({"exact", "monte-carlo"}))
      ->capture_default_str();
  audit_cmd->add_option("--mc-kind", audit_kind,
                        "monte-carlo sampling: mechanism (W ~ M(S), exact ratio) or "
                        "inequality (independent X1, X2)")
      ->check(CLI::IsMember({"mechanism", "inequality"}))
      ->capture_default_str();
  audit_cmd->add_option("--trials", audit_trials, "Monte Carlo trials")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  // dataset
  DatasetFlags ds;
  std::optional<std::uint64_t> ds_n;
  std::optional<std::uint64_t> ds_domain;
  std::string ds_write;
  std::string ds_read;
  CLI::App* ds_cmd = app.add_subcommand(
      "dataset", "Generate a dataset file, or summarize an existing one");
  ds_cmd->add_option("--spec", ds.spec, "uniform | zipf:<s> | planted:<x>=<count>,...")
      ->capture_default_str();
  ds_cmd->add_option("--n", ds_n, "Number of users n");
  ds_cmd->add_option("--B", ds_domain, "Domain size B");
  ds_cmd->add_option("--write", ds_write, "Binary dataset file to write");
  ds_cmd->add_option("--read", ds_read, "Existing dataset file to summarize");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }

  if (common.entropy) {
    std::random_device device;
    common.seed = (static_cast<std::uint64_t>(device()) << 32) ^ device();
  }

  if (params_cmd->parsed()) {
    const FEParams fe = ResolveFEParams(params_fe);
    Json doc = ToJson(fe);
    doc["beta"] = params_fe.beta;
    doc["alpha"] = ErrorBoundAlpha(fe, params_fe.beta);
    if (params_phi) {
      const double delta = params_fe.delta.value_or(DefaultDelta(fe.num_users));
      doc["hhd"] = ToJson(DeriveHHDParams(
          fe.num_users, fe.domain_size,
          params_fe.bins.value_or(DefaultNumBins(fe.num_users)),
          params_fe.epsilon, delta, *params_phi, params_hhd.gamma_hh,
          params_hhd.c_sub, params_fe.gamma_robust));
    }
    EmitJson(common, doc);
    return kExitOk;
  }

  if (fe_cmd->parsed()) {
    const FEParams fe = ResolveFEParams(fe_flags);
    const Dataset data =
        ResolveDataset(fe_data, fe.num_users, fe.domain_size, common.seed);
    ExperimentOptions options;
    options.trials = fe_trials;
    options.seed = common.seed;
    options.threads = common.threads;
    options.beta = fe_flags.beta;
    options.element_statistics = fe_estimates;
    ErrorReport report = RunFEExperiment(data, fe, options);
    if (!fe_bag_out.empty()) {
      WriteFile(fe_bag_out,
                fe.variant == Variant::kFE0
                    ? EncodeBag(SimulateFE0Bag(data, fe, common.seed), fe)
                    : EncodeBag(SimulateFE1Bag(data, fe, common.seed), fe));
    }
    if (common.format == "csv") {
      Emit(common, ToCsv(report, common.include_timings));
      return kExitOk;
    }
    if (fe_clamp) {
      const double n = static_cast<double>(fe.num_users);
      for (double& m : report.element_mean) m = std::clamp(m, 0.0, n);
    }
    Json doc{{"command", "fe"},
             {"seed", common.seed},
             {"params", ToJson(fe)},
             {"dataset", DatasetSummary(data)},
             {"report", ToJson(report, common.include_timings)}};
    EmitJson(common, doc);
    return kExitOk;
  }

  if (hhd_cmd->parsed()) {
    const std::uint64_t n = Required(hhd_fe.n, "--n");
    const std::uint64_t domain = Required(hhd_fe.domain, "--B");
    const HHDParams hhd = DeriveHHDParams(
        n, domain, hhd_fe.bins.value_or(DefaultNumBins(n)), hhd_fe.epsilon,
        hhd_fe.delta.value_or(DefaultDelta(n)), hhd_flags.phi,
        hhd_flags.gamma_hh, hhd_flags.c_sub, hhd_fe.gamma_robust);
    const Dataset data = ResolveDataset(hhd_data, n, domain, common.seed);
    ExperimentOptions options;
    options.trials = hhd_trials;
    options.seed = common.seed;
    options.threads = common.threads;
    const RecallReport report = RunHHDExperiment(data, hhd, options);
    if (!hhd_bag_out.empty()) {
      WriteFile(hhd_bag_out, EncodeBag(SimulateHHDBag(data, hhd, common.seed), hhd));
    }
    if (common.format == "csv") {
      Emit(common, ToCsv(report, common.include_timings));
      return kExitOk;
    }
    Json doc{{"command", "hhd"},
             {"seed", common.seed},
             {"params", ToJson(hhd)},
             {"dataset", DatasetSummary(data)},
             {"report", ToJson(report, common.include_timings)}};
    EmitJson(common, doc);
    return kExitOk;
  }

  if (audit_cmd->parsed()) {
    ValidateBIBParams(bib);
    PrivacyAuditReport report;
    if (audit_mode == "exact") {
      report = ExactPrivacyAudit(bib, audit_eps, audit_delta);
    } else if (audit_kind == "inequality") {
      report = MonteCarloInequality(bib, audit_eps, audit_delta, audit_trials,
                                    common.seed, common.threads);
    } else {
      std::vector<std::uint64_t> special(bib.s);
      std::vector<std::uint64_t> neighbor(bib.s);
      for (std::uint64_t i = 0; i < bib.s; ++i) {
        special[i] = i + 1;
        neighbor[i] = bib.m - bib.s + 1 + i;
      }
      report = MonteCarloPrivacyLoss(bib, special, neighbor, audit_eps,
                                     audit_delta, audit_trials, common.seed,
                                     common.threads);
    }
    Json doc = ToJson(report);
    doc["params"] = ToJson(bib);
    if (report.mode == AuditMode::kMonteCarlo) doc["seed"] = common.seed;
    EmitJson(common, doc);
    return kExitOk;
  }

  if (ds_cmd->parsed()) {
    Dataset data;
    if (!ds_read.empty()) {
      data = DecodeDataset(ReadFile(ds_read));
    } else {
      data = GenerateDataset(ParseDatasetSpec(ds.spec), Required(ds_n, "--n"),
                             Required(ds_domain, "--B"),
                             DeriveSeed(common.seed, kDatasetStream));
      if (!ds_write.empty()) WriteFile(ds_write, EncodeDataset(data));
    }
    EmitJson(common, DatasetSummary(data));
    return kExitOk;
  }
  return kExitInternal;
}

}  // namespace
}  // namespace shuffledp

int main(int argc, char** argv) {
  try {
    return shuffledp::Run(argc, argv);
  } catch (const shuffledp::InvalidParameterError& e) {
    std::cerr << "error: invalid parameter: " << e.what() << "\n";
    return shuffledp::kExitInvalid;
  } catch (const shuffledp::InvalidInputError& e) {
    std::cerr << "error: invalid input: " << e.what() << "\n";
    return shuffledp::kExitInvalid;
  } catch (const shuffledp::SizeLimitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return shuffledp::kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return shuffledp::kExitInternal;
  }
}
