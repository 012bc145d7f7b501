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

#ifndef SHUFFLEDP_SIM_H_
#define SHUFFLEDP_SIM_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "shuffledp/fe.h"
#include "shuffledp/hhd.h"
#include "shuffledp/params.h"

namespace shuffledp {

// --- Datasets --------------------------------------------------------------

struct UniformSpec {};
struct ZipfSpec {
  double exponent = 1.1;
};
struct PlantedSpec {
  // (element, exact count); the remaining users are spread uniformly over
  // the elements that are not listed.
  std::vector<std::pair<Element, std::uint64_t>> heavy;
};
using DatasetSpec = std::variant<UniformSpec, ZipfSpec, PlantedSpec>;

// "uniform", "zipf:<s>", "planted:<x>=<count>,<x>=<count>,...".
DatasetSpec ParseDatasetSpec(const std::string& text);
std::string FormatDatasetSpec(const DatasetSpec& spec);

struct Dataset {
  std::vector<Element> values;  // 1-based elements of [B]
  std::uint64_t domain_size = 0;
  std::string spec;
  std::uint64_t seed = 0;
  bool operator==(const Dataset&) const = default;
};

Dataset GenerateDataset(const DatasetSpec& spec, std::uint64_t num_users,
                        std::uint64_t domain_size, std::uint64_t seed);

// counts[x] = number of users holding x; counts[0] is unused.
std::vector<std::uint64_t> TrueFrequencies(const Dataset& dataset);

// Dataset file: "SDPD" | version u8 | 3 reserved bytes | n u64 | B u64 |
// seed u64 | spec length u32 | spec bytes | values - 1 packed in
// ceil(log2 B) bits each into one little-endian bit stream.
std::vector<std::uint8_t> EncodeDataset(const Dataset& dataset);
Dataset DecodeDataset(std::span<const std::uint8_t> bytes);

// --- Shuffler over heterogeneous inputs ------------------------------------

using NoisyMessage = std::variant<FE0Message, FE1Message, HHDMessage>;
using AnyBag = std::variant<FE0Bag, FE1Bag, HHDBag>;

// Typed multiset union of per-user outputs that may arrive as NoisyMessage.
// Throws InvalidInputError if message types are mixed. An empty input
// yields an empty FE0 bag.
AnyBag ShuffleMessages(std::span<const std::vector<NoisyMessage>> per_user,
                       Rng& rng);

// --- Experiments -----------------------------------------------------------

struct ExperimentOptions {
  std::uint64_t trials = 1;
  std::uint64_t seed = kDefaultSeed;
  int threads = 1;
  double beta = 0.1;
  // Keep per-element estimate statistics (costs B doubles per trial).
  bool element_statistics = true;
};

struct PhaseTimes {
  double randomize_seconds = 0.0;
  double shuffle_seconds = 0.0;
  double analyze_seconds = 0.0;
};

struct ErrorReport {
  std::uint64_t trials = 0;
  std::vector<double> max_error;              // per trial
  std::vector<double> messages_per_user;      // per trial
  std::vector<double> estimate_sum;           // per trial, sum over x of g_hat
  std::vector<std::uint8_t> within_bound;     // per trial
  double mean_messages_per_user = 0.0;
  double expected_messages_per_user = 0.0;    // 1 + rho
  double alpha_bound = 0.0;
  double beta = 0.0;
  std::uint64_t bound_satisfied_count = 0;
  // Per element (index x - 1) over trials; empty when disabled.
  std::vector<double> element_mean;
  std::vector<double> element_stddev;
  std::vector<std::uint64_t> true_frequency;  // index x - 1
  std::vector<PhaseTimes> wall_times;         // per trial; not part of results

  // Equality of everything except wall-clock measurements.
  bool SameResults(const ErrorReport& other) const;
};

// Messages each of n users would send; used for the messages-per-user
// contract without holding the bag in memory.
struct MessageCountReport {
  std::uint64_t users = 0;
  std::uint64_t messages = 0;
  double mean = 0.0;
  double expected = 0.0;
  bool operator==(const MessageCountReport&) const = default;
};

// The shuffled bag of trial \`trial\` under master \`seed\`, exactly as the
// experiment runners produce it.
FE0Bag SimulateFE0Bag(const Dataset& dataset, const FEParams& params,
                      std::uint64_t seed, std::uint64_t trial = 0);
FE1Bag SimulateFE1Bag(const Dataset& dataset, const FEParams& params,
                      std::uint64_t seed, std::uint64_t trial = 0);
HHDBag SimulateHHDBag(const Dataset& dataset, const HHDParams& params,
                      std::uint64_t seed, std::uint64_t trial = 0);

ErrorReport RunFEExperiment(const Dataset& dataset, const FEParams& params,
                            const ExperimentOptions& options);

MessageCountReport CountFEMessages(const Dataset& dataset, const FEParams& params,
                                   std::uint64_t seed, int threads = 1);
MessageCountReport CountHHDMessages(const Dataset& dataset,
                                    const HHDParams& params, std::uint64_t seed,
                                    int threads = 1);

struct RecallReport {
  std::uint64_t trials = 0;
  std::vector<std::uint64_t> true_heavy_set;  // 0-based, freq >= phi n
  std::vector<std::uint64_t> reported_size;   // per trial
  std::vector<std::uint8_t> all_reported;     // per trial
  std::uint64_t recall_count = 0;
  std::vector<std::uint64_t> false_positives;  // per trial, reported \ true
  // Reported elements whose true frequency is at most phi n - 2 alpha_L.
  std::vector<std::uint64_t> unsound_reports;  // per trial
  double soundness_threshold = 0.0;
  std::vector<std::uint64_t> max_candidate_size;   // per trial, max_l |C_l|
  std::vector<std::uint64_t> layer_max_candidates;  // per layer 1..L-1
  std::vector<double> messages_per_user;           // per trial
  double expected_messages_per_user = 0.0;
  std::vector<PhaseTimes> wall_times;

  bool SameResults(const RecallReport& other) const;
};

RecallReport RunHHDExperiment(const Dataset& dataset, const HHDParams& params,
                              const ExperimentOptions& options);

}  // namespace shuffledp

#endif  // SHUFFLEDP_SIM_H_
