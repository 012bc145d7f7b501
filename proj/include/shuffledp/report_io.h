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

#ifndef SHUFFLEDP_REPORT_IO_H_
#define SHUFFLEDP_REPORT_IO_H_

#include <string>

#include <nlohmann/json.hpp>
#include "shuffledp/bib.h"
#include "shuffledp/params.h"
#include "shuffledp/sim.h"

namespace shuffledp {

using Json = nlohmann::ordered_json;

Json ToJson(const FEParams& params);
Json ToJson(const BIBParams& params);
Json ToJson(const HHDParams& params);
Json ToJson(const PrivacyAuditReport& report);
Json ToJson(const MessageCountReport& report);
Json ToJson(const ErrorReport& report, bool include_timings = false);
Json ToJson(const RecallReport& report, bool include_timings = false);
// Header fields and frequency summary; the values themselves live in the
// binary dataset file.
Json DatasetSummary(const Dataset& dataset);

// Reads the user-facing fields of a parameter document and re-derives the
// rest. Derived fields present in the document (q, rho, p_col) must agree
// with the derivation, otherwise InvalidParameterError is thrown.
FEParams FEParamsFromJson(const Json& doc);
BIBParams BIBParamsFromJson(const Json& doc);

// One row per trial:
//   trial,max_error,messages_per_user,within_bound[,randomize_s,shuffle_s,analyze_s]
std::string ToCsv(const ErrorReport& report, bool include_timings = false);
//   trial,reported,all_heavy_reported,false_positives,unsound,max_candidates,
//   messages_per_user[,randomize_s,shuffle_s,analyze_s]
std::string ToCsv(const RecallReport& report, bool include_timings = false);

}  // namespace shuffledp

#endif  // SHUFFLEDP_REPORT_IO_H_
