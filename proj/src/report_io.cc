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

#include "shuffledp/report_io.h"

#include <cmath>
#include <sstream>

#include "shuffledp/errors.h"

namespace shuffledp {
namespace {

Json TimesJson(const PhaseTimes& t) {
  return Json{{"randomize_s", t.randomize_seconds},
              {"shuffle_s", t.shuffle_seconds},
              {"analyze_s", t.analyze_seconds}};
}

void AppendTimes(std::ostringstream& out, const PhaseTimes& t) {
  out << ',' << t.randomize_seconds << ',' << t.shuffle_seconds << ','
      << t.analyze_seconds;
}

template <typename T>
T Field(const Json& doc, const char* key) {
  if (!doc.contains(key)) {
    throw InvalidParameterError(std::string("parameter document lacks '") + key + "'");
  }
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidParameterError(std::string("parameter '") + key +
                                "' has the wrong type");
  }
}

void CheckDerived(const Json& doc, const char* key, double derived) {
  if (!doc.contains(key)) return;
  const double given = Field<double>(doc, key);
  if (std::abs(given - derived) > 1e-9 * std::max(1.0, std::abs(derived))) {
    throw InvalidParameterError(std::string("parameter '") + key +
                                "' disagrees with the value derived from the "
                                "other fields");
  }
}

}  // namespace

Json ToJson(const FEParams& p) {
  return Json{{"variant", VariantName(p.variant)},
              {"n", p.num_users},
              {"B", p.domain_size},
              {"b", p.num_bins},
              {"q", p.prime},
              {"rho", p.rho},
              {"p_col", p.p_col},
              {"epsilon", p.epsilon},
              {"delta", p.delta},
              {"gamma_robust", p.gamma_robust}};
}

Json ToJson(const BIBParams& p) {
  return Json{{"m", p.m}, {"s", p.s}, {"k", p.k}, {"n", p.n}, {"p", p.p}};
}

Json ToJson(const HHDParams& p) {
  Json layers = Json::array();
  for (const HHDLayer& layer : p.layers) {
    layers.push_back(Json{{"level", layer.level},
                          {"epsilon", layer.epsilon},
                          {"delta", layer.delta},
                          {"fe", ToJson(layer.fe)}});
  }
  return Json{{"n", p.num_users},
              {"B", p.domain_size},
              {"b", p.num_bins},
              {"epsilon", p.epsilon},
              {"delta", p.delta},
              {"gamma_robust", p.gamma_robust},
              {"phi", p.phi},
              {"gamma_hh", p.gamma_hh},
              {"c_sub", p.c_sub},
              {"q_sub", p.q_sub},
              {"q_sub_clamped", p.q_sub_clamped},
              {"Delta", p.prune_threshold},
              {"tau", p.report_threshold},
              {"L", p.levels},
              {"layers", layers},
              {"warnings", p.warnings}};
}

Json ToJson(const PrivacyAuditReport& r) {
  Json doc{{"mode", AuditModeName(r.mode)},
           {"epsilon", r.epsilon},
           {"failure_probability", r.failure_probability},
           {"delta_bound", r.delta_bound},
           {"condition_holds", r.condition_holds}};
  if (r.trials) doc["trials"] = *r.trials;
  if (r.standard_error) doc["standard_error"] = *r.standard_error;
  return doc;
}

Json ToJson(const MessageCountReport& r) {
  return Json{{"users", r.users},
              {"messages", r.messages},
              {"mean_messages_per_user", r.mean},
              {"expected_messages_per_user", r.expected}};
}

Json ToJson(const ErrorReport& r, bool include_timings) {
  Json doc{{"trials", r.trials},
           {"max_error", r.max_error},
           {"messages_per_user", r.messages_per_user},
           {"mean_messages_per_user", r.mean_messages_per_user},
           {"expected_messages_per_user", r.expected_messages_per_user},
           {"alpha_bound", r.alpha_bound},
           {"beta", r.beta},
           {"bound_satisfied_count", r.bound_satisfied_count},
           {"estimate_sum", r.estimate_sum}};
  if (!r.element_mean.empty()) {
    doc["element_mean"] = r.element_mean;
    doc["element_stddev"] = r.element_stddev;
  }
  if (include_timings) {
    Json times = Json::array();
    for (const PhaseTimes& t : r.wall_times) times.push_back(TimesJson(t));
    doc["wall_times"] = times;
  }
  return doc;
}

Json ToJson(const RecallReport& r, bool include_timings) {
  Json doc{{"trials", r.trials},
           {"true_heavy_set", r.true_heavy_set},
           {"recall_count", r.recall_count},
           {"reported_size", r.reported_size},
           {"false_positives", r.false_positives},
           {"soundness_threshold", r.soundness_threshold},
           {"unsound_reports", r.unsound_reports},
           {"max_candidate_size", r.max_candidate_size},
           {"layer_max_candidates", r.layer_max_candidates},
           {"messages_per_user", r.messages_per_user},
           {"expected_messages_per_user", r.expected_messages_per_user}};
  if (include_timings) {
    Json times = Json::array();
    for (const PhaseTimes& t : r.wall_times) times.push_back(TimesJson(t));
    doc["wall_times"] = times;
  }
  return doc;
}

Json DatasetSummary(const Dataset& dataset) {
  const std::vector<std::uint64_t> counts = TrueFrequencies(dataset);
  std::uint64_t distinct = 0;
  std::uint64_t top_element = 0;
  std::uint64_t top_count = 0;
  for (std::uint64_t x = 1; x < counts.size(); ++x) {
    if (counts[x] > 0) ++distinct;
    if (counts[x] > top_count) {
      top_count = counts[x];
      top_element = x;
    }
  }
  return Json{{"n", dataset.values.size()},
              {"B", dataset.domain_size},
              {"seed", dataset.seed},
              {"spec", dataset.spec},
              {"distinct", distinct},
              {"most_frequent", top_element},
              {"most_frequent_count", top_count}};
}

FEParams FEParamsFromJson(const Json& doc) {
  const Variant variant = ParseVariant(Field<std::string>(doc, "variant"));
  const auto n = Field<std::uint64_t>(doc, "n");
  const auto B = Field<std::uint64_t>(doc, "B");
  const auto b = variant == Variant::kFE1 ? Field<std::uint64_t>(doc, "b") : B;
  const double gamma =
      doc.contains("gamma_robust") ? Field<double>(doc, "gamma_robust") : 1.0;
  FEParams params = DeriveFEParams(variant, n, B, b, Field<double>(doc, "epsilon"),
                                   Field<double>(doc, "delta"), gamma);
  CheckDerived(doc, "q", static_cast<double>(params.prime));
  CheckDerived(doc, "rho", params.rho);
  CheckDerived(doc, "p_col", params.p_col);
  return params;
}

BIBParams BIBParamsFromJson(const Json& doc) {
  BIBParams params{Field<std::uint64_t>(doc, "m"), Field<std::uint64_t>(doc, "s"),
                   Field<std::uint64_t>(doc, "k"), Field<std::uint64_t>(doc, "n"),
                   Field<double>(doc, "p")};
  ValidateBIBParams(params);
  return params;
}

std::string ToCsv(const ErrorReport& r, bool include_timings) {
  std::ostringstream out;
  out.precision(17);
  out << "trial,max_error,messages_per_user,within_bound";
  if (include_timings) out << ",randomize_s,shuffle_s,analyze_s";
  out << '\n';
  for (std::size_t t = 0; t < r.max_error.size(); ++t) {
    out << t << ',' << r.max_error[t] << ',' << r.messages_per_user[t] << ','
        << static_cast<int>(r.within_bound[t]);
    if (include_timings) AppendTimes(out, r.wall_times[t]);
    out << '\n';
  }
  return out.str();
}

std::string ToCsv(const RecallReport& r, bool include_timings) {
  std::ostringstream out;
  out.precision(17);
  out << "trial,reported,all_heavy_reported,false_positives,unsound,"
         "max_candidates,messages_per_user";
  if (include_timings) out << ",randomize_s,shuffle_s,analyze_s";
  out << '\n';
  for (std::size_t t = 0; t < r.reported_size.size(); ++t) {
    out << t << ',' << r.reported_size[t] << ','
        << static_cast<int>(r.all_reported[t]) << ',' << r.false_positives[t]
        << ',' << r.unsound_reports[t] << ',' << r.max_candidate_size[t] << ','
        << r.messages_per_user[t];
    if (include_timings) AppendTimes(out, r.wall_times[t]);
    out << '\n';
  }
  return out.str();
}

}  // namespace shuffledp
