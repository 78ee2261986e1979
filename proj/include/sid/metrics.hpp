// include/sid/metrics.hpp

// Copyright 2026 The sid-harness Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <ostream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sid/manifest.hpp"

namespace sid {

struct StopEvent {
  // Absent: the system never stopped within the turn.
  std::optional<double> stop_time_s;
};

enum class OutcomeKind { kTP, kFP, kFN, kTN };
std::string_view to_string(OutcomeKind k);
OutcomeKind parse_outcome_kind(std::string_view s);

// How a false positive is charged: the whole planned turn, or only what
// remained of it after the premature stop.
enum class FpPenaltyMode { kFullTurn, kRemainingTurn };
std::string_view to_string(FpPenaltyMode m);
FpPenaltyMode parse_fp_penalty_mode(std::string_view s);

struct Outcome {
  OutcomeKind kind = OutcomeKind::kTN;
  double penalty_s = 0.0;
  std::string instance_id;
  // Grouping tags copied from the instance.
  Language language = Language::kNone;
  Category category = Category::kUninterrupted;
  std::optional<double> stop_time_s;
};

struct MetricBlock {
  std::optional<double> irl_s;  // mean TP penalty; absent without TPs
  double fir = 0.0;
  double apt_s = 0.0;
  std::size_t n = 0;
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

// Throws Error(kPrecondition) when the stop lies beyond turn_duration_s.
Outcome classify_outcome(const EvalInstance& instance, const StopEvent& stop,
                         FpPenaltyMode mode = FpPenaltyMode::kFullTurn);

// Throws Error(kPrecondition) on empty input.
MetricBlock compute_block(const std::vector<Outcome>& outcomes);

// Outcome files: one record per line with id, language, category, kind,
// penalty_s and stop_time_s (null when absent).
void write_outcomes_jsonl(std::ostream& os, const std::vector<Outcome>& outcomes);
std::vector<Outcome> read_outcomes_jsonl(std::istream& is);
std::vector<Outcome> read_outcomes_jsonl(const std::filesystem::path& path);

using StopLog = std::map<std::string, StopEvent>;

// Records {"id": ..., "stop_time_s": <seconds> | "none" | null}. Duplicate
// ids and malformed lines are Error(kData) carrying the line number.
StopLog parse_stop_log(std::istream& is);
StopLog parse_stop_log(const std::filesystem::path& path);

// One outcome per instance, in instance order. Instances missing from the
// log are scored as never stopping.
std::vector<Outcome> score_from_log(const std::vector<EvalInstance>& instances,
                                    const StopLog& log, FpPenaltyMode mode);

enum class Group { kEN, kZH, kNoiseSilence };
std::string_view to_string(Group g);
Group group_of(Language lang);

struct GroupedBlocks {
  std::map<Group, MetricBlock> groups;  // only non-empty groups
  MetricBlock pooled;                   // micro average over all outcomes
  MetricBlock macro;                    // unweighted mean of group blocks
};

// Throws Error(kPrecondition) on empty input.
GroupedBlocks aggregate(const std::vector<Outcome>& outcomes);

}  // namespace sid
