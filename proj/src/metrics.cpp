// src/metrics.cpp

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

#include "sid/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "sid/error.hpp"

namespace sid {

std::string_view to_string(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::kTP: return "TP";
    case OutcomeKind::kFP: return "FP";
    case OutcomeKind::kFN: return "FN";
    case OutcomeKind::kTN: return "TN";
  }
  return "?";
}

OutcomeKind parse_outcome_kind(std::string_view s) {
  for (auto k : {OutcomeKind::kTP, OutcomeKind::kFP, OutcomeKind::kFN, OutcomeKind::kTN})
    if (to_string(k) == s) return k;
  throw Error(ErrorKind::kData, "unknown outcome kind '" + std::string(s) + "'");
}

std::string_view to_string(FpPenaltyMode m) {
  return m == FpPenaltyMode::kFullTurn ? "full-turn" : "remaining-turn";
}

FpPenaltyMode parse_fp_penalty_mode(std::string_view s) {
  if (s == "full-turn" || s == "FullTurn") return FpPenaltyMode::kFullTurn;
  if (s == "remaining-turn" || s == "RemainingTurn") return FpPenaltyMode::kRemainingTurn;
  throw Error(ErrorKind::kConfig, "unknown FP penalty mode '" + std::string(s) + "'");
}

Outcome classify_outcome(const EvalInstance& instance, const StopEvent& stop,
                         FpPenaltyMode mode) {
  const double turn = instance.turn_duration_s;
  if (stop.stop_time_s) {
    const double t = *stop.stop_time_s;
    if (t < 0.0 || t > turn)
      throw Error(ErrorKind::kPrecondition,
                  "instance " + instance.id + ": stop time " + std::to_string(t) +
                      " outside [0, turn_duration " + std::to_string(turn) + "]");
  }

  Outcome out;
  out.instance_id = instance.id;
  out.language = instance.language;
  out.category = instance.category;
  out.stop_time_s = stop.stop_time_s;

  auto fp_penalty = [&](double t) {
    return mode == FpPenaltyMode::kFullTurn ? turn : turn - t;
  };

  if (instance.break_time_s) {
    const double b = *instance.break_time_s;
    if (!stop.stop_time_s) {
      out.kind = OutcomeKind::kFN;
      out.penalty_s = turn - b;
    } else if (*stop.stop_time_s < b) {
      out.kind = OutcomeKind::kFP;
      out.penalty_s = fp_penalty(*stop.stop_time_s);
    } else {
      out.kind = OutcomeKind::kTP;
      out.penalty_s = *stop.stop_time_s - b;
    }
  } else if (stop.stop_time_s) {
    out.kind = OutcomeKind::kFP;
    out.penalty_s = fp_penalty(*stop.stop_time_s);
  } else {
    out.kind = OutcomeKind::kTN;
    out.penalty_s = 0.0;
  }
  return out;
}

MetricBlock compute_block(const std::vector<Outcome>& outcomes) {
  if (outcomes.empty())
    throw Error(ErrorKind::kPrecondition, "cannot compute metrics over zero outcomes");
  MetricBlock m;
  double total = 0.0, tp_total = 0.0;
  for (const auto& o : outcomes) {
    total += o.penalty_s;
    switch (o.kind) {
      case OutcomeKind::kTP:
        ++m.tp;
        tp_total += o.penalty_s;
        break;
      case OutcomeKind::kFP: ++m.fp; break;
      case OutcomeKind::kFN: ++m.fn; break;
      case OutcomeKind::kTN: ++m.tn; break;
    }
  }
  m.n = outcomes.size();
  m.fir = static_cast<double>(m.fp) / static_cast<double>(m.n);
  m.apt_s = total / static_cast<double>(m.n);
  if (m.tp > 0) m.irl_s = tp_total / static_cast<double>(m.tp);
  return m;
}

void write_outcomes_jsonl(std::ostream& os, const std::vector<Outcome>& outcomes) {
  for (const auto& o : outcomes) {
    nlohmann::ordered_json j;
    j["id"] = o.instance_id;
    j["language"] = to_string(o.language);
    j["category"] = to_string(o.category);
    j["kind"] = to_string(o.kind);
    j["penalty_s"] = o.penalty_s;
    j["stop_time_s"] = o.stop_time_s ? nlohmann::ordered_json(*o.stop_time_s)
                                     : nlohmann::ordered_json(nullptr);
    os << j.dump() << '\n';
  }
}

std::vector<Outcome> read_outcomes_jsonl(std::istream& is) {
  std::vector<Outcome> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      Outcome o;
      o.instance_id = j.at("id").get<std::string>();
      o.language = parse_language(j.at("language").get<std::string>());
      o.category = parse_category(j.at("category").get<std::string>());
      o.kind = parse_outcome_kind(j.at("kind").get<std::string>());
      o.penalty_s = j.at("penalty_s").get<double>();
      if (j.contains("stop_time_s") && !j["stop_time_s"].is_null())
        o.stop_time_s = j["stop_time_s"].get<double>();
      out.push_back(std::move(o));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kData,
                  "outcome line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorKind::kData,
                  "outcome line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<Outcome> read_outcomes_jsonl(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  try {
    return read_outcomes_jsonl(is);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

StopLog parse_stop_log(std::istream& is) {
  StopLog log;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "stop log line " + std::to_string(line_no) + ": ";
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kData, where + "malformed record");
    }
    if (!rec.is_object() || !rec.contains("id") || !rec["id"].is_string() ||
        !rec.contains("stop_time_s"))
      throw Error(ErrorKind::kData, where + "expected {id, stop_time_s}");
    const auto& v = rec["stop_time_s"];
    StopEvent ev;
    if (v.is_number()) {
      ev.stop_time_s = v.get<double>();
      if (*ev.stop_time_s < 0.0)
        throw Error(ErrorKind::kData, where + "negative stop time");
    } else if (!(v.is_null() || (v.is_string() && v.get<std::string>() == "none"))) {
      throw Error(ErrorKind::kData, where + "stop_time_s must be a number or \"none\"");
    }
    const auto id = rec["id"].get<std::string>();
    if (!log.emplace(id, ev).second)
      throw Error(ErrorKind::kData, where + "duplicate entry for id " + id);
  }
  return log;
}

StopLog parse_stop_log(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  try {
    return parse_stop_log(is);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

std::vector<Outcome> score_from_log(const std::vector<EvalInstance>& instances,
                                    const StopLog& log, FpPenaltyMode mode) {
  std::map<std::string_view, const EvalInstance*> by_id;
  for (const auto& inst : instances) by_id.emplace(inst.id, &inst);
  for (const auto& [id, ev] : log)
    if (!by_id.count(id))
      throw Error(ErrorKind::kData, "stop log id '" + id + "' not in manifest");

  std::vector<Outcome> out;
  out.reserve(instances.size());
  for (const auto& inst : instances) {
    auto it = log.find(inst.id);
    out.push_back(classify_outcome(inst, it == log.end() ? StopEvent{} : it->second, mode));
  }
  return out;
}

std::string_view to_string(Group g) {
  switch (g) {
    case Group::kEN: return "EN";
    case Group::kZH: return "ZH";
    case Group::kNoiseSilence: return "NoiseSilence";
  }
  return "?";
}

Group group_of(Language lang) {
  switch (lang) {
    case Language::kEN: return Group::kEN;
    case Language::kZH: return Group::kZH;
    case Language::kNone: return Group::kNoiseSilence;
  }
  return Group::kNoiseSilence;
}

GroupedBlocks aggregate(const std::vector<Outcome>& outcomes) {
  // Canonical order so floating-point sums do not depend on input order.
  std::vector<Outcome> sorted = outcomes;
  std::sort(sorted.begin(), sorted.end(), [](const Outcome& a, const Outcome& b) {
    return std::tie(a.instance_id, a.kind, a.penalty_s) <
           std::tie(b.instance_id, b.kind, b.penalty_s);
  });

  GroupedBlocks out;
  out.pooled = compute_block(sorted);

  std::map<Group, std::vector<Outcome>> split;
  for (const auto& o : sorted) split[group_of(o.language)].push_back(o);
  for (const auto& [g, v] : split) out.groups.emplace(g, compute_block(v));

  MetricBlock& macro = out.macro;
  double irl_sum = 0.0;
  std::size_t irl_groups = 0;
  for (const auto& [g, b] : out.groups) {
    macro.fir += b.fir;
    macro.apt_s += b.apt_s;
    if (b.irl_s) {
      irl_sum += *b.irl_s;
      ++irl_groups;
    }
    macro.n += b.n;
    macro.tp += b.tp;
    macro.fp += b.fp;
    macro.fn += b.fn;
    macro.tn += b.tn;
  }
  const auto k = static_cast<double>(out.groups.size());
  macro.fir /= k;
  macro.apt_s /= k;
  if (irl_groups > 0) macro.irl_s = irl_sum / static_cast<double>(irl_groups);
  return out;
}

}  // namespace sid
