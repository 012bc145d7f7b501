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

#include "shuffledp/hhd.h"

#include <string>

#include "shuffledp/errors.h"

namespace shuffledp {
namespace {

void CheckShape(const HHDParams& params) {
  if (params.levels < 1 ||
      params.layers.size() != static_cast<std::size_t>(params.levels) ||
      params.domain_size != (std::uint64_t{1} << params.levels)) {
    throw InvalidParameterError(
        "heavy-hitter parameters must carry one layer per bit of B");
  }
}

double SamplingRate(const HHDParams& params, int level) {
  return level == params.levels ? 1.0 : params.q_sub;
}

std::uint64_t CountMatches(std::span<const HHDMessage> messages,
                           const FEParams& fe, std::uint64_t prefix) {
  const Element x = prefix + 1;
  std::uint64_t count = 0;
  if (fe.variant == Variant::kFE0) {
    for (const HHDMessage& m : messages) count += m.r == x ? 1 : 0;
  } else {
    for (const HHDMessage& m : messages) {
      if (HashEval(m.u, m.v, x, fe.prime, fe.num_bins) == m.r) ++count;
    }
  }
  return count;
}

double Estimate(std::uint64_t count, const FEParams& fe, double rate) {
  return fe.variant == Variant::kFE0 ? FE0Estimate(count, fe, rate)
                                     : FE1Estimate(count, fe, rate);
}

// Scans a layer's sub-bag for candidate estimates. FE0 layers are tallied
// once; FE1 layers are queried per candidate.
class LayerView {
 public:
  LayerView(std::span<const HHDMessage> messages, const HHDParams& params,
            int level)
      : messages_(messages),
        fe_(params.layer(level).fe),
        rate_(SamplingRate(params, level)) {
    if (fe_.variant == Variant::kFE0) {
      tally_.assign(fe_.domain_size + 1, 0);
      for (const HHDMessage& m : messages_) ++tally_[m.r];
    }
  }

  double EstimateOf(std::uint64_t prefix) const {
    const std::uint64_t count = fe_.variant == Variant::kFE0
                                    ? tally_[prefix + 1]
                                    : CountMatches(messages_, fe_, prefix);
    return Estimate(count, fe_, rate_);
  }

 private:
  std::span<const HHDMessage> messages_;
  const FEParams& fe_;
  double rate_;
  std::vector<std::uint64_t> tally_;
};

}  // namespace

std::uint64_t Prefix(std::uint64_t x, int length, int levels) {
  if (levels < 1 || levels > 63 || length < 1 || length > levels ||
      x >= (std::uint64_t{1} << levels)) {
    throw InvalidInputError("prefix needs 0 <= x < 2^L and 1 <= i <= L");
  }
  return x >> (levels - length);
}

std::vector<HHDMessage> RandomizeHHD(std::uint64_t x, const HHDParams& params,
                                     Rng& rng) {
  CheckShape(params);
  if (x >= params.domain_size) {
    throw InvalidInputError("element must lie in [0, B) (got " +
                            std::to_string(x) + ")");
  }
  std::vector<HHDMessage> out;
  for (const HHDLayer& layer : params.layers) {
    const Element value = Prefix(x, layer.level, params.levels) + 1;
    const bool final_layer = layer.level == params.levels;
    const auto layer_tag = static_cast<std::uint32_t>(layer.level);
    if (layer.fe.variant == Variant::kFE0) {
      for (const FE0Message& m : RandomizeFE0Lifted(value, layer.fe, rng)) {
        if (final_layer || Bernoulli(rng, params.q_sub)) {
          out.push_back(HHDMessage{layer_tag, Variant::kFE0, 0, 0, m.value});
        }
      }
    } else {
      for (const FE1Message& m : RandomizeFE1(value, layer.fe, rng)) {
        if (final_layer || Bernoulli(rng, params.q_sub)) {
          out.push_back(HHDMessage{layer_tag, Variant::kFE1, m.u, m.v, m.w});
        }
      }
    }
  }
  return out;
}

double ExpectedHHDMessagesPerUser(const HHDParams& params) {
  CheckShape(params);
  double total = 0.0;
  for (const HHDLayer& layer : params.layers) {
    total += SamplingRate(params, layer.level) * (1.0 + layer.fe.rho);
  }
  return total;
}

double LayerEstimate(std::span<const HHDMessage> layer_messages,
                     const HHDParams& params, int level, std::uint64_t prefix) {
  CheckShape(params);
  const FEParams& fe = params.layer(level).fe;
  return Estimate(CountMatches(layer_messages, fe, prefix), fe,
                  SamplingRate(params, level));
}

HHDResult RunHHDAnalyzer(const HHDBag& bag, const HHDParams& params) {
  CheckShape(params);
  const int levels = params.levels;
  std::vector<std::vector<HHDMessage>> by_layer(levels + 1);
  for (const HHDMessage& m : bag) {
    if (m.layer < 1 || m.layer > static_cast<std::uint32_t>(levels)) {
      throw InvalidInputError("message layer " + std::to_string(m.layer) +
                              " outside [1, " + std::to_string(levels) + "]");
    }
    const FEParams& fe = params.layer(static_cast<int>(m.layer)).fe;
    const bool fits = m.encoding == fe.variant &&
                      (fe.variant == Variant::kFE0
                           ? m.r >= 1 && m.r <= fe.domain_size
                           : m.u >= 1 && m.u < fe.prime && m.v < fe.prime &&
                                 m.r < fe.num_bins);
    if (!fits) {
      throw InvalidInputError("message does not match layer " +
                              std::to_string(m.layer) + " encoding");
    }
    by_layer[m.layer].push_back(m);
  }

  HHDResult result;
  std::vector<std::uint64_t> current{0};
  for (int level = 1; level < levels; ++level) {
    const LayerView view(by_layer[level], params, level);
    CandidateSet next{level, {}};
    for (std::uint64_t c : current) {
      for (std::uint64_t child : {2 * c, 2 * c + 1}) {
        if (!(view.EstimateOf(child) < params.prune_threshold)) {
          next.prefixes.push_back(child);
        }
      }
    }
    current = next.prefixes;
    result.candidates.push_back(std::move(next));
  }

  const LayerView final_view(by_layer[levels], params, levels);
  for (std::uint64_t c : current) {
    for (std::uint64_t child : {2 * c, 2 * c + 1}) {
      if (!(final_view.EstimateOf(child) < params.report_threshold)) {
        result.heavy.push_back(child);
      }
    }
  }
  return result;
}

std::vector<std::uint64_t> AnalyzeHHD(const HHDBag& bag,
                                      const HHDParams& params) {
  return RunHHDAnalyzer(bag, params).heavy;
}

std::vector<CandidateSet> HHDCandidateTrace(const HHDBag& bag,
                                            const HHDParams& params) {
  return RunHHDAnalyzer(bag, params).candidates;
}

}  // namespace shuffledp
