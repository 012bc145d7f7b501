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

#include "shuffledp/sim.h"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstring>
#include <sstream>
#include <string>

#include "shuffledp/errors.h"
#include "shuffledp/message_bag.h"
#include "shuffledp/parallel.h"
#include "shuffledp/wire.h"

namespace shuffledp {
namespace {

using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::uint64_t ParseUnsigned(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  std::uint64_t value = 0;
  try {
    value = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw InvalidParameterError("invalid " + what + ": '" + text + "'");
  }
  return value;
}

void CheckDatasetMatches(const Dataset& dataset, std::uint64_t num_users,
                         std::uint64_t domain_size) {
  if (dataset.values.size() != num_users) {
    throw InvalidParameterError("dataset has " +
                                std::to_string(dataset.values.size()) +
                                " users but parameters expect n=" +
                                std::to_string(num_users));
  }
  if (dataset.domain_size != domain_size) {
    throw InvalidParameterError("dataset domain B=" +
                                std::to_string(dataset.domain_size) +
                                " does not match parameters B=" +
                                std::to_string(domain_size));
  }
  for (Element x : dataset.values) {
    if (x < 1 || x > domain_size) {
      throw InvalidInputError("dataset value outside [1, B]");
    }
  }
}

template <typename Message, typename Randomize>
MessageBag<Message> RunUsers(const Dataset& dataset, std::uint64_t trial_seed,
                             Randomize&& randomize, PhaseTimes& times) {
  auto start = Clock::now();
  std::vector<std::vector<Message>> per_user(dataset.values.size());
  for (std::size_t i = 0; i < dataset.values.size(); ++i) {
    Rng rng = Substream(trial_seed, i);
    per_user[i] = randomize(dataset.values[i], rng);
  }
  times.randomize_seconds = SecondsSince(start);
  start = Clock::now();
  Rng shuffler = Substream(trial_seed, kShuffleStream);
  MessageBag<Message> bag =
      Shuffle<Message>(std::span<const std::vector<Message>>(per_user), shuffler);
  times.shuffle_seconds = SecondsSince(start);
  return bag;
}

struct FETrial {
  double max_error = 0.0;
  double messages_per_user = 0.0;
  double estimate_sum = 0.0;
  std::vector<double> estimates;
  PhaseTimes times;
};

template <typename Message, typename Randomize, typename AnalyzeAll>
FETrial RunFETrial(const Dataset& dataset, const FEParams& params,
                   const std::vector<std::uint64_t>& truth,
                   std::uint64_t trial_seed, Randomize&& randomize,
                   AnalyzeAll&& analyze_all) {
  FETrial trial;
  const MessageBag<Message> bag =
      RunUsers<Message>(dataset, trial_seed, randomize, trial.times);
  const auto start = Clock::now();
  const std::vector<FrequencyEstimate> estimates = analyze_all(bag, params);
  trial.times.analyze_seconds = SecondsSince(start);
  trial.estimates.reserve(estimates.size());
  for (const FrequencyEstimate& e : estimates) {
    trial.max_error = std::max(
        trial.max_error, std::abs(e.g_hat - static_cast<double>(truth[e.element])));
    trial.estimate_sum += e.g_hat;
    trial.estimates.push_back(e.g_hat);
  }
  trial.messages_per_user =
      static_cast<double>(bag.size()) / static_cast<double>(params.num_users);
  return trial;
}

std::vector<std::uint64_t> UserMessageCounts(std::size_t users, int threads,
                                             auto&& count_user) {
  std::vector<std::uint64_t> counts(users, 0);
  constexpr std::size_t kChunk = 4096;
  const std::size_t chunks = (users + kChunk - 1) / kChunk;
  ParallelFor(chunks, threads, [&](std::size_t c) {
    const std::size_t end = std::min(users, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) counts[i] = count_user(i);
  });
  return counts;
}

MessageCountReport Summarize(const std::vector<std::uint64_t>& counts,
                             double expected) {
  MessageCountReport report;
  report.users = counts.size();
  for (std::uint64_t c : counts) report.messages += c;
  report.mean = counts.empty() ? 0.0
                               : static_cast<double>(report.messages) /
                                     static_cast<double>(counts.size());
  report.expected = expected;
  return report;
}

}  // namespace

DatasetSpec ParseDatasetSpec(const std::string& text) {
  if (text == "uniform") return UniformSpec{};
  if (text.rfind("zipf:", 0) == 0) {
    const std::string arg = text.substr(5);
    std::size_t used = 0;
    double exponent = 0.0;
    try {
      exponent = std::stod(arg, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != arg.size() || !(exponent >= 0.0)) {
      throw InvalidParameterError("zipf exponent must be a number >= 0 (got '" +
                                  arg + "')");
    }
    return ZipfSpec{exponent};
  }
  if (text.rfind("planted:", 0) == 0) {
    PlantedSpec spec;
    std::stringstream items(text.substr(8));
    std::string item;
    while (std::getline(items, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) {
        throw InvalidParameterError("planted entries look like <x>=<count> (got '" +
                                    item + "')");
      }
      spec.heavy.emplace_back(ParseUnsigned(item.substr(0, eq), "planted element"),
                              ParseUnsigned(item.substr(eq + 1), "planted count"));
    }
    return spec;
  }
  throw InvalidParameterError(
      "dataset spec must be uniform, zipf:<s> or planted:<x>=<count>,... (got '" +
      text + "')");
}

std::string FormatDatasetSpec(const DatasetSpec& spec) {
  if (std::holds_alternative<UniformSpec>(spec)) return "uniform";
  if (const auto* zipf = std::get_if<ZipfSpec>(&spec)) {
    std::ostringstream out;
    out << "zipf:" << zipf->exponent;
    return out.str();
  }
  std::string out = "planted:";
  const auto& planted = std::get<PlantedSpec>(spec);
  for (std::size_t i = 0; i < planted.heavy.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(planted.heavy[i].first) + "=" +
           std::to_string(planted.heavy[i].second);
  }
  return out;
}

Dataset GenerateDataset(const DatasetSpec& spec, std::uint64_t num_users,
                        std::uint64_t domain_size, std::uint64_t seed) {
  if (domain_size < 1) throw InvalidParameterError("B must be >= 1");
  Dataset dataset;
  dataset.domain_size = domain_size;
  dataset.seed = seed;
  dataset.spec = FormatDatasetSpec(spec);
  dataset.values.reserve(num_users);
  Rng rng = Substream(seed, kDatasetStream);

  if (std::holds_alternative<UniformSpec>(spec)) {
    for (std::uint64_t i = 0; i < num_users; ++i) {
      dataset.values.push_back(UniformInt(rng, 1, domain_size));
    }
    return dataset;
  }
  if (const auto* zipf = std::get_if<ZipfSpec>(&spec)) {
    std::vector<double> weights(domain_size);
    for (std::uint64_t k = 1; k <= domain_size; ++k) {
      weights[k - 1] = std::pow(static_cast<double>(k), -zipf->exponent);
    }
    std::discrete_distribution<std::uint64_t> rank(weights.begin(), weights.end());
    for (std::uint64_t i = 0; i < num_users; ++i) {
      dataset.values.push_back(rank(rng) + 1);
    }
    return dataset;
  }

  const auto& planted = std::get<PlantedSpec>(spec);
  std::vector<std::uint8_t> listed(domain_size + 1, 0);
  std::uint64_t placed = 0;
  for (const auto& [element, count] : planted.heavy) {
    if (element < 1 || element > domain_size) {
      throw InvalidInputError("planted element " + std::to_string(element) +
                              " outside [1, B]");
    }
    if (listed[element]) {
      throw InvalidInputError("planted element " + std::to_string(element) +
                              " listed twice");
    }
    listed[element] = 1;
    if (count > num_users - placed) {
      throw InvalidInputError("planted frequencies sum to more than n=" +
                              std::to_string(num_users));
    }
    placed += count;
    dataset.values.insert(dataset.values.end(), count, element);
  }
  std::vector<Element> tail_elements;
  for (Element x = 1; x <= domain_size; ++x) {
    if (!listed[x]) tail_elements.push_back(x);
  }
  if (placed < num_users && tail_elements.empty()) {
    throw InvalidInputError("planted elements cover [B] but do not sum to n");
  }
  for (std::uint64_t i = placed; i < num_users; ++i) {
    dataset.values.push_back(
        tail_elements[UniformInt(rng, 0, tail_elements.size() - 1)]);
  }
  std::shuffle(dataset.values.begin(), dataset.values.end(), rng);
  return dataset;
}

std::vector<std::uint64_t> TrueFrequencies(const Dataset& dataset) {
  std::vector<std::uint64_t> counts(dataset.domain_size + 1, 0);
  for (Element x : dataset.values) {
    if (x < 1 || x > dataset.domain_size) {
      throw InvalidInputError("dataset value outside [1, B]");
    }
    ++counts[x];
  }
  return counts;
}

namespace {
constexpr std::array<std::uint8_t, 4> kDatasetMagic = {'S', 'D', 'P', 'D'};
constexpr std::uint8_t kDatasetVersion = 1;
}  // namespace

std::vector<std::uint8_t> EncodeDataset(const Dataset& dataset) {
  std::vector<std::uint8_t> out(kDatasetMagic.begin(), kDatasetMagic.end());
  out.push_back(kDatasetVersion);
  out.insert(out.end(), 3, 0);
  AppendU64(out, dataset.values.size());
  AppendU64(out, dataset.domain_size);
  AppendU64(out, dataset.seed);
  const auto length = static_cast<std::uint32_t>(dataset.spec.size());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(length >> (8 * i)));
  out.insert(out.end(), dataset.spec.begin(), dataset.spec.end());
  BitWriter values;
  const int width = BitWidth(dataset.domain_size);
  for (Element x : dataset.values) values.Write(x - 1, width);
  const std::vector<std::uint8_t> packed = values.Finish();
  out.insert(out.end(), packed.begin(), packed.end());
  return out;
}

Dataset DecodeDataset(std::span<const std::uint8_t> bytes) {
  constexpr std::size_t kFixed = 4 + 4 + 3 * 8 + 4;
  if (bytes.size() < kFixed ||
      std::memcmp(bytes.data(), kDatasetMagic.data(), kDatasetMagic.size()) != 0) {
    throw InvalidInputError("not a dataset file (bad magic or truncated header)");
  }
  if (bytes[4] != kDatasetVersion) {
    throw InvalidInputError("unsupported dataset version");
  }
  Dataset dataset;
  const std::uint64_t n = ReadU64(bytes, 8);
  dataset.domain_size = ReadU64(bytes, 16);
  dataset.seed = ReadU64(bytes, 24);
  std::uint32_t length = 0;
  for (int i = 0; i < 4; ++i) length |= static_cast<std::uint32_t>(bytes[32 + i]) << (8 * i);
  if (bytes.size() < kFixed + length) throw InvalidInputError("truncated dataset spec");
  dataset.spec.assign(bytes.begin() + kFixed, bytes.begin() + kFixed + length);
  const int width = BitWidth(dataset.domain_size);
  const std::span<const std::uint8_t> body = bytes.subspan(kFixed + length);
  const std::size_t expected_bytes = (static_cast<std::size_t>(n) * width + 7) / 8;
  if (body.size() != expected_bytes) {
    throw InvalidInputError("dataset body has the wrong length");
  }
  BitReader reader(body);
  dataset.values.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const Element x = reader.Read(width) + 1;
    if (x > dataset.domain_size) throw InvalidInputError("dataset value outside [1, B]");
    dataset.values.push_back(x);
  }
  return dataset;
}

AnyBag ShuffleMessages(std::span<const std::vector<NoisyMessage>> per_user,
                       Rng& rng) {
  std::vector<NoisyMessage> all;
  for (const auto& bag : per_user) all.insert(all.end(), bag.begin(), bag.end());
  if (all.empty()) return FE0Bag();
  const std::size_t kind = all.front().index();
  for (const NoisyMessage& m : all) {
    if (m.index() != kind) {
      throw InvalidInputError("cannot shuffle mixed message types into one bag");
    }
  }
  std::shuffle(all.begin(), all.end(), rng);
  return std::visit(
      [&all](const auto& first) -> AnyBag {
        using Message = std::decay_t<decltype(first)>;
        std::vector<Message> typed;
        typed.reserve(all.size());
        for (const NoisyMessage& m : all) typed.push_back(std::get<Message>(m));
        return MessageBag<Message>(std::move(typed));
      },
      all.front());
}

bool ErrorReport::SameResults(const ErrorReport& o) const {
  return trials == o.trials && max_error == o.max_error &&
         messages_per_user == o.messages_per_user &&
         estimate_sum == o.estimate_sum && within_bound == o.within_bound &&
         mean_messages_per_user == o.mean_messages_per_user &&
         expected_messages_per_user == o.expected_messages_per_user &&
         alpha_bound == o.alpha_bound && beta == o.beta &&
         bound_satisfied_count == o.bound_satisfied_count &&
         element_mean == o.element_mean && element_stddev == o.element_stddev &&
         true_frequency == o.true_frequency;
}

bool RecallReport::SameResults(const RecallReport& o) const {
  return trials == o.trials && true_heavy_set == o.true_heavy_set &&
         reported_size == o.reported_size && all_reported == o.all_reported &&
         recall_count == o.recall_count && false_positives == o.false_positives &&
         unsound_reports == o.unsound_reports &&
         soundness_threshold == o.soundness_threshold &&
         max_candidate_size == o.max_candidate_size &&
         layer_max_candidates == o.layer_max_candidates &&
         messages_per_user == o.messages_per_user &&
         expected_messages_per_user == o.expected_messages_per_user;
}

FE0Bag SimulateFE0Bag(const Dataset& dataset, const FEParams& params,
                      std::uint64_t seed, std::uint64_t trial) {
  CheckDatasetMatches(dataset, params.num_users, params.domain_size);
  PhaseTimes ignored;
  return RunUsers<FE0Message>(
      dataset, DeriveSeed(seed, trial),
      [&](Element x, Rng& rng) { return RandomizeFE0(x, params, rng); }, ignored);
}

FE1Bag SimulateFE1Bag(const Dataset& dataset, const FEParams& params,
                      std::uint64_t seed, std::uint64_t trial) {
  CheckDatasetMatches(dataset, params.num_users, params.domain_size);
  PhaseTimes ignored;
  return RunUsers<FE1Message>(
      dataset, DeriveSeed(seed, trial),
      [&](Element x, Rng& rng) { return RandomizeFE1(x, params, rng); }, ignored);
}

HHDBag SimulateHHDBag(const Dataset& dataset, const HHDParams& params,
                      std::uint64_t seed, std::uint64_t trial) {
  CheckDatasetMatches(dataset, params.num_users, params.domain_size);
  PhaseTimes ignored;
  return RunUsers<HHDMessage>(
      dataset, DeriveSeed(seed, trial),
      [&](Element x, Rng& rng) { return RandomizeHHD(x - 1, params, rng); },
      ignored);
}

ErrorReport RunFEExperiment(const Dataset& dataset, const FEParams& params,
                            const ExperimentOptions& options) {
  CheckDatasetMatches(dataset, params.num_users, params.domain_size);
  if (options.trials < 1) throw InvalidParameterError("trials must be >= 1");
  const std::vector<std::uint64_t> truth = TrueFrequencies(dataset);

  ErrorReport report;
  report.trials = options.trials;
  report.beta = options.beta;
  report.alpha_bound = ErrorBoundAlpha(params, options.beta);
  report.expected_messages_per_user = 1.0 + params.rho;
  report.true_frequency.assign(truth.begin() + 1, truth.end());

  std::vector<FETrial> trials(options.trials);
  ParallelFor(options.trials, options.threads, [&](std::size_t t) {
    const std::uint64_t trial_seed = DeriveSeed(options.seed, t);
    if (params.variant == Variant::kFE0) {
      trials[t] = RunFETrial<FE0Message>(
          dataset, params, truth, trial_seed,
          [&](Element x, Rng& rng) { return RandomizeFE0(x, params, rng); },
          [](const FE0Bag& bag, const FEParams& p) { return AnalyzeFE0All(bag, p); });
    } else {
      trials[t] = RunFETrial<FE1Message>(
          dataset, params, truth, trial_seed,
          [&](Element x, Rng& rng) { return RandomizeFE1(x, params, rng); },
          [](const FE1Bag& bag, const FEParams& p) { return AnalyzeFE1All(bag, p); });
    }
    if (!options.element_statistics) trials[t].estimates.clear();
  });

  double messages = 0.0;
  for (const FETrial& trial : trials) {
    report.max_error.push_back(trial.max_error);
    report.messages_per_user.push_back(trial.messages_per_user);
    report.estimate_sum.push_back(trial.estimate_sum);
    const bool within = trial.max_error <= report.alpha_bound;
    report.within_bound.push_back(within ? 1 : 0);
    report.bound_satisfied_count += within ? 1 : 0;
    report.wall_times.push_back(trial.times);
    messages += trial.messages_per_user;
  }
  report.mean_messages_per_user = messages / static_cast<double>(options.trials);

  if (options.element_statistics) {
    const std::size_t B = params.domain_size;
    report.element_mean.assign(B, 0.0);
    report.element_stddev.assign(B, 0.0);
    const double count = static_cast<double>(options.trials);
    for (const FETrial& trial : trials) {
      for (std::size_t i = 0; i < B; ++i) report.element_mean[i] += trial.estimates[i];
    }
    for (double& m : report.element_mean) m /= count;
    if (options.trials > 1) {
      for (const FETrial& trial : trials) {
        for (std::size_t i = 0; i < B; ++i) {
          const double d = trial.estimates[i] - report.element_mean[i];
          report.element_stddev[i] += d * d;
        }
      }
      for (double& s : report.element_stddev) s = std::sqrt(s / (count - 1.0));
    }
  }
  return report;
}

MessageCountReport CountFEMessages(const Dataset& dataset, const FEParams& params,
                                   std::uint64_t seed, int threads) {
  CheckDatasetMatches(dataset, params.num_users, params.domain_size);
  const auto counts =
      UserMessageCounts(dataset.values.size(), threads, [&](std::size_t i) {
        Rng rng = Substream(seed, i);
        return params.variant == Variant::kFE0
                   ? RandomizeFE0(dataset.values[i], params, rng).size()
                   : RandomizeFE1(dataset.values[i], params, rng).size();
      });
  return Summarize(counts, 1.0 + params.rho);
}

MessageCountReport CountHHDMessages(const Dataset& dataset,
                                    const HHDParams& params, std::uint64_t seed,
                                    int threads) {
  CheckDatasetMatches(dataset, params.num_users, params.domain_size);
  const auto counts =
      UserMessageCounts(dataset.values.size(), threads, [&](std::size_t i) {
        Rng rng = Substream(seed, i);
        return RandomizeHHD(dataset.values[i] - 1, params, rng).size();
      });
  return Summarize(counts, ExpectedHHDMessagesPerUser(params));
}

RecallReport RunHHDExperiment(const Dataset& dataset, const HHDParams& params,
                              const ExperimentOptions& options) {
  CheckDatasetMatches(dataset, params.num_users, params.domain_size);
  if (options.trials < 1) throw InvalidParameterError("trials must be >= 1");
  const std::vector<std::uint64_t> truth = TrueFrequencies(dataset);
  const double heavy_count = params.phi * static_cast<double>(params.num_users);

  RecallReport report;
  report.trials = options.trials;
  for (Element x = 1; x <= params.domain_size; ++x) {
    if (static_cast<double>(truth[x]) >= heavy_count) {
      report.true_heavy_set.push_back(x - 1);
    }
  }
  const double alpha_final = ErrorBoundAlpha(params.layers.back().fe, 0.1);
  report.soundness_threshold = heavy_count - 2.0 * alpha_final;
  report.expected_messages_per_user = ExpectedHHDMessagesPerUser(params);
  report.layer_max_candidates.assign(params.levels - 1, 0);

  struct Trial {
    HHDResult result;
    double messages_per_user = 0.0;
    PhaseTimes times;
  };
  std::vector<Trial> trials(options.trials);
  ParallelFor(options.trials, options.threads, [&](std::size_t t) {
    const std::uint64_t trial_seed = DeriveSeed(options.seed, t);
    Trial& trial = trials[t];
    const HHDBag bag = RunUsers<HHDMessage>(
        dataset, trial_seed,
        [&](Element x, Rng& rng) { return RandomizeHHD(x - 1, params, rng); },
        trial.times);
    const auto start = Clock::now();
    trial.result = RunHHDAnalyzer(bag, params);
    trial.times.analyze_seconds = SecondsSince(start);
    trial.messages_per_user =
        static_cast<double>(bag.size()) / static_cast<double>(params.num_users);
  });

  for (const Trial& trial : trials) {
    const auto& heavy = trial.result.heavy;
    report.reported_size.push_back(heavy.size());
    const bool all = std::includes(heavy.begin(), heavy.end(),
                                   report.true_heavy_set.begin(),
                                   report.true_heavy_set.end());
    report.all_reported.push_back(all ? 1 : 0);
    report.recall_count += all ? 1 : 0;
    std::uint64_t false_positives = 0;
    std::uint64_t unsound = 0;
    for (std::uint64_t x : heavy) {
      if (!std::binary_search(report.true_heavy_set.begin(),
                              report.true_heavy_set.end(), x)) {
        ++false_positives;
      }
      if (static_cast<double>(truth[x + 1]) <= report.soundness_threshold) ++unsound;
    }
    report.false_positives.push_back(false_positives);
    report.unsound_reports.push_back(unsound);
    std::uint64_t largest = 0;
    for (const CandidateSet& c : trial.result.candidates) {
      const std::uint64_t size = c.prefixes.size();
      largest = std::max(largest, size);
      auto& slot = report.layer_max_candidates[c.layer - 1];
      slot = std::max(slot, size);
    }
    report.max_candidate_size.push_back(largest);
    report.messages_per_user.push_back(trial.messages_per_user);
    report.wall_times.push_back(trial.times);
  }
  return report;
}

}  // namespace shuffledp
