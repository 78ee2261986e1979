// src/cli.cpp

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

#include "sid/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "sid/annotation.hpp"
#include "sid/cropgen.hpp"
#include "sid/detector_factory.hpp"
#include "sid/error.hpp"
#include "sid/manifest.hpp"
#include "sid/metrics.hpp"
#include "sid/report.hpp"
#include "sid/streaming.hpp"

namespace sid {
namespace {

namespace fs = std::filesystem;

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::kConfig: return kExitConfig;
    case ErrorKind::kProtocol: return kExitProtocol;
    case ErrorKind::kData:
    case ErrorKind::kIo:
    case ErrorKind::kPrecondition: return kExitData;
  }
  return kExitData;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os || !(os << content)) throw Error(ErrorKind::kIo, "cannot write " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + dir.string() + ": " + ec.message());
}

// Report tables, FAN table, histogram and outcome file for one system.
void write_reports(const fs::path& dir, const std::string& system,
                   const std::vector<Outcome>& outcomes,
                   const std::vector<std::string>& footnotes) {
  {
    std::ostringstream os;
    write_outcomes_jsonl(os, outcomes);
    write_file(dir / "outcomes.jsonl", os.str());
  }
  if (outcomes.empty()) return;
  const std::vector<ReportRow> rows{{system, aggregate(outcomes)}};
  write_file(dir / "report.csv", render_table(rows, TableFormat::kCsv));
  write_file(dir / "report.txt", render_table(rows, TableFormat::kAlignedText, footnotes));
  write_file(dir / "report.md", render_table(rows, TableFormat::kMarkdown, footnotes));
  const std::vector<FanRow> fan{fan_row(system, outcomes)};
  write_file(dir / "fan.csv", render_fan_table(fan, TableFormat::kCsv));
  write_file(dir / "fan.txt", render_fan_table(fan, TableFormat::kAlignedText));
  write_file(dir / "penalty_hist.csv", penalty_histogram_csv(outcomes, 0.5));
}

struct EvaluateArgs {
  std::string manifest;
  std::string detector = "oracle";
  std::string name;
  int chunk_ms = 100;
  int k = 3;
  std::string fp_mode = "full-turn";
  std::string feed_mode = "incremental";
  bool realtime = false;
  int parallelism = 1;
  std::string output_dir = "sid-out";
  uint64_t seed = 0;
  int sample_rate = 16000;
  int timeout_ms = 2000;
  EnergyVadParams energy;
};

int cmd_evaluate(const EvaluateArgs& a) {
  SessionConfig cfg;
  cfg.chunk_ms = a.chunk_ms;
  cfg.k_consecutive = a.k;
  cfg.realtime = a.realtime;
  cfg.feed_mode = parse_feed_mode(a.feed_mode);
  cfg.validate();
  const FpPenaltyMode mode = parse_fp_penalty_mode(a.fp_mode);
  if (a.parallelism < 1) throw Error(ErrorKind::kConfig, "--parallelism must be >= 1");

  DetectorSpec spec = parse_detector_spec(a.detector);
  spec.sample_rate_hz = a.sample_rate;
  spec.energy = a.energy;
  spec.energy.validate();
  spec.external.timeout_ms = a.timeout_ms;
  const HelloParams hello{a.sample_rate, a.chunk_ms, cfg.feed_mode};

  const auto instances = load_manifest(a.manifest);
  spdlog::info("loaded {} instances from {}", instances.size(), a.manifest);

  // Fail fast (exit 4) when an external peer cannot even complete the
  // handshake, instead of reporting every session as errored.
  if (spec.kind == DetectorSpec::Kind::kExternal) make_detector(spec, hello);

  const DetectorFactory factory = [spec, hello] { return make_detector(spec, hello); };
  const auto results = run_suite(instances, factory, cfg, a.parallelism);

  const fs::path out(a.output_dir);
  ensure_dir(out);
  std::ostringstream traces, errors;
  std::vector<Outcome> outcomes;
  std::size_t errored = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    std::optional<SessionError> err = r.error;
    if (r.trace) {
      write_trace_jsonl(traces, r.instance_id, *r.trace);
      try {
        outcomes.push_back(classify_outcome(instances[i], r.trace->stop, mode));
      } catch (const Error& e) {
        err = SessionError{e.kind(), e.protocol_code(), e.what()};
      }
    }
    if (err) {
      ++errored;
      nlohmann::ordered_json j;
      j["id"] = r.instance_id;
      j["kind"] = to_string(err->kind);
      j["code"] = to_string(err->code);
      j["message"] = err->message;
      errors << j.dump() << '\n';
      spdlog::warn("session {} failed: {}", r.instance_id, err->message);
    }
  }
  write_file(out / "traces.jsonl", traces.str());
  write_file(out / "errors.jsonl", errors.str());

  const std::string system = a.name.empty() ? a.detector : a.name;
  const std::vector<std::string> footnotes{
      "FP penalty mode: " + std::string(to_string(mode)),
      "chunk_ms=" + std::to_string(a.chunk_ms) + ", K=" + std::to_string(a.k) +
          ", feed=" + std::string(to_string(cfg.feed_mode)) +
          (a.realtime ? ", realtime" : ", logical time"),
      "Average = pooled (micro) over all outcomes; Macro = unweighted mean of groups"};
  write_reports(out, system, outcomes, footnotes);

  nlohmann::ordered_json summary;
  summary["instances"] = instances.size();
  summary["scored"] = outcomes.size();
  summary["errored"] = errored;
  write_file(out / "summary.json", summary.dump(2) + "\n");

  if (!outcomes.empty())
    std::cout << render_table({{system, aggregate(outcomes)}}, TableFormat::kAlignedText,
                              footnotes);
  if (errored > 0) {
    std::cerr << errored << " of " << instances.size() << " sessions errored (see "
              << (out / "errors.jsonl").string() << ")\n";
    return kExitPartial;
  }
  return kExitOk;
}

int cmd_score(const std::string& manifest, const std::string& stop_log,
              const std::string& fp_mode, const std::string& output_dir,
              const std::string& name) {
  const FpPenaltyMode mode = parse_fp_penalty_mode(fp_mode);
  const auto instances = load_manifest(manifest);
  const auto log = parse_stop_log(fs::path(stop_log));
  const auto outcomes = score_from_log(instances, log, mode);
  ensure_dir(output_dir);
  const std::vector<std::string> footnotes{
      "FP penalty mode: " + std::string(to_string(mode)),
      "stop times from " + stop_log,
      "Average = pooled (micro) over all outcomes; Macro = unweighted mean of groups"};
  write_reports(output_dir, name, outcomes, footnotes);
  if (!outcomes.empty())
    std::cout << render_table({{name, aggregate(outcomes)}}, TableFormat::kAlignedText,
                              footnotes);
  return kExitOk;
}

std::string read_text(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw Error(ErrorKind::kIo, "cannot open " + p.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string fusion_record(const std::string& id, const FusionResult& r) {
  nlohmann::ordered_json j;
  j["id"] = id;
  j["break_time_s"] = r.break_time_s;
  j["matched_word"] = r.matched_word;
  j["alignment_cost"] = r.alignment_cost;
  return j.dump();
}

int cmd_fuse(const std::string& ctm, const std::string& tagged, const std::string& tagged_jsonl,
             std::string id, double max_cost_ratio, const std::string& out) {
  const auto rows = parse_ctm(fs::path(ctm));
  const auto by_utt = group_by_utterance(rows);
  const FuseOptions opts{max_cost_ratio};
  std::string output;
  int failures = 0;

  auto fuse_one = [&](const std::string& utt, const std::string& text) {
    auto it = by_utt.find(utt);
    if (it == by_utt.end())
      throw Error(ErrorKind::kData, "utterance '" + utt + "' not in CTM");
    const auto transcript = locate_break(text);
    if (!transcript.break_index) {
      spdlog::info("{}: no <break> tag, no break record", utt);
      return;
    }
    output += fusion_record(utt, fuse(transcript, it->second, opts)) + "\n";
  };

  if (!tagged_jsonl.empty()) {
    std::istringstream is(read_text(tagged_jsonl));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      std::string utt;
      try {
        const auto j = nlohmann::json::parse(line);
        utt = j.at("id").get<std::string>();
        fuse_one(utt, j.at("text").get<std::string>());
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::kData, tagged_jsonl + ":" + std::to_string(line_no) +
                                          ": malformed record");
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kData) throw;
        std::cerr << utt << ": " << e.what() << "\n";
        ++failures;
      }
    }
  } else {
    if (tagged.empty()) throw Error(ErrorKind::kConfig, "fuse needs --tagged or --tagged-jsonl");
    if (id.empty()) {
      if (by_utt.size() != 1)
        throw Error(ErrorKind::kConfig, "CTM holds several utterances; pass --id");
      id = by_utt.begin()->first;
    }
    fuse_one(id, read_text(tagged));
  }

  if (out.empty() || out == "-")
    std::cout << output;
  else
    write_file(out, output);
  return failures > 0 ? kExitData : kExitOk;
}

int cmd_cropgen(const std::string& manifest, const std::string& ctm, const CropConfig& cfg,
                const std::string& output_dir, bool emit_audio) {
  cfg.validate();
  const auto instances = load_manifest(manifest);
  std::map<std::string, std::vector<WordAlignment>> by_utt;
  if (!ctm.empty()) by_utt = group_by_utterance(parse_ctm(fs::path(ctm)));

  std::vector<ClipSample> clips;
  for (const auto& inst : instances) {
    if (inst.duration_s() < cfg.min_clip_s) {
      spdlog::warn("{}: shorter than min clip length, skipped", inst.id);
      continue;
    }
    std::vector<WordAlignment> words;
    if (auto it = by_utt.find(inst.id); it != by_utt.end()) words = it->second;
    if (inst.break_time_s && cfg.intent_delay && words.empty())
      throw Error(ErrorKind::kData, inst.id +
                                        ": intent delay needs word alignments (--ctm) "
                                        "or --no-intent-delay");
    auto part = generate_clips(inst, words, cfg);
    clips.insert(clips.end(), part.begin(), part.end());
  }
  const auto path = export_clips(clips, instances, output_dir, emit_audio);
  std::cout << clips.size() << " clips -> " << path.string() << "\n";
  return kExitOk;
}

int cmd_validate(const std::string& manifest, const std::string& expect) {
  const auto file = load_manifest_file(manifest);
  const auto summary = summarize(file.instances);
  std::cout << composition_to_json(summary).dump() << "\n";
  std::optional<CorpusSummary> expected;
  if (!expect.empty())
    expected = load_composition(expect);
  else
    expected = file.declared;
  if (!expected) return kExitOk;
  const auto diffs = validate_composition(summary, *expected);
  for (const auto& d : diffs)
    std::cout << "mismatch (" << to_string(d.bucket.first) << ", " << to_string(d.bucket.second)
              << "): expected " << d.expected << ", actual " << d.actual << "\n";
  return diffs.empty() ? kExitOk : kExitData;
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& format,
               bool fan, const std::string& out) {
  const TableFormat fmt = parse_table_format(format);
  std::vector<ReportRow> rows;
  std::vector<FanRow> fan_rows;
  for (const auto& spec : inputs) {
    const auto eq = spec.find('=');
    const std::string name = eq == std::string::npos ? fs::path(spec).stem().string()
                                                     : spec.substr(0, eq);
    const std::string path = eq == std::string::npos ? spec : spec.substr(eq + 1);
    const auto outcomes = read_outcomes_jsonl(fs::path(path));
    if (outcomes.empty()) throw Error(ErrorKind::kData, path + ": no outcomes");
    rows.push_back({name, aggregate(outcomes)});
    fan_rows.push_back(fan_row(name, outcomes));
  }
  const std::string text = fan ? render_fan_table(fan_rows, fmt) : render_table(rows, fmt);
  if (out.empty() || out == "-")
    std::cout << text;
  else
    write_file(out, text);
  return kExitOk;
}

}  // namespace

void init_logging() {
  const char* env = std::getenv("SID_HARNESS_LOG");
  spdlog::level::level_enum level = spdlog::level::warn;
  if (env && *env) level = spdlog::level::from_str(env);
  spdlog::set_level(level);
}

int run_cli(int argc, char** argv) {
  init_logging();
  CLI::App app{"Streaming evaluation harness for barge-in detection"};
  app.set_config("--config", "", "key = value config file; flags override it");
  app.require_subcommand(1);

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Replay a manifest against a detector and score it");
  evaluate->add_option("--manifest", ev.manifest, "Benchmark manifest (JSONL)")->required();
  evaluate->add_option("--detector", ev.detector,
                       "oracle | always | never | energy | external:tcp:HOST:PORT | "
                       "external:subprocess:CMD")
      ->capture_default_str();
  evaluate->add_option("--name", ev.name, "System name used in reports");
  evaluate->add_option("--chunk-ms", ev.chunk_ms)->capture_default_str();
  evaluate->add_option("--k", ev.k, "Consecutive Interrupt decisions required")->capture_default_str();
  evaluate->add_option("--fp-penalty-mode", ev.fp_mode, "full-turn | remaining-turn")
      ->capture_default_str();
  evaluate->add_option("--feed-mode", ev.feed_mode, "incremental | cumulative")->capture_default_str();
  evaluate->add_flag("--realtime", ev.realtime, "Pace chunks by wall clock");
  evaluate->add_option("-j,--parallelism", ev.parallelism)->capture_default_str();
  evaluate->add_option("-o,--output-dir", ev.output_dir)->capture_default_str();
  evaluate->add_option("--seed", ev.seed, "Unused by built-in detectors")->capture_default_str();
  evaluate->add_option("--sample-rate", ev.sample_rate, "Detector sample rate")->capture_default_str();
  evaluate->add_option("--timeout-ms", ev.timeout_ms, "External detector timeout")->capture_default_str();
  evaluate->add_option("--threshold-dbfs", ev.energy.threshold_dbfs)->capture_default_str();
  evaluate->add_option("--frame-ms", ev.energy.frame_ms)->capture_default_str();
  evaluate->add_option("--hop-ms", ev.energy.hop_ms)->capture_default_str();
  evaluate->add_option("--min-speech-ms", ev.energy.min_speech_ms)->capture_default_str();
  evaluate->add_option("--hangover-ms", ev.energy.hangover_ms)->capture_default_str();

  std::string sc_manifest, sc_log, sc_mode = "full-turn", sc_out = "sid-out", sc_name = "system";
  auto* score = app.add_subcommand("score", "Score precomputed stop times");
  score->add_option("--manifest", sc_manifest)->required();
  score->add_option("--stop-log", sc_log, "JSONL {id, stop_time_s | \"none\"}")->required();
  score->add_option("--fp-penalty-mode", sc_mode)->capture_default_str();
  score->add_option("-o,--output-dir", sc_out)->capture_default_str();
  score->add_option("--name", sc_name)->capture_default_str();

  std::string fu_ctm, fu_tagged, fu_jsonl, fu_id, fu_out;
  double fu_ratio = 0.30;
  auto* fuse_cmd = app.add_subcommand("fuse", "Fuse a <break>-tagged transcript with a CTM");
  fuse_cmd->add_option("--ctm", fu_ctm)->required();
  fuse_cmd->add_option("--tagged", fu_tagged, "Plain-text tagged transcript");
  fuse_cmd->add_option("--tagged-jsonl", fu_jsonl, "JSONL {id, text} for batch fusion");
  fuse_cmd->add_option("--id", fu_id, "Utterance id in the CTM");
  fuse_cmd->add_option("--max-cost-ratio", fu_ratio)->capture_default_str();
  fuse_cmd->add_option("--out", fu_out, "Output JSONL (default stdout)");

  CropConfig crop;
  std::string cr_manifest, cr_ctm, cr_out = "clips";
  bool cr_audio = false, cr_no_delay = false;
  auto* cropgen = app.add_subcommand("cropgen", "Generate labeled prefix clips for training");
  cropgen->add_option("--manifest", cr_manifest)->required();
  cropgen->add_option("--ctm", cr_ctm, "Word alignments keyed by instance id");
  cropgen->add_option("--n", crop.n_clips_per_utt)->capture_default_str();
  cropgen->add_option("--seed", crop.seed)->capture_default_str();
  cropgen->add_option("--min-clip-s", crop.min_clip_s)->capture_default_str();
  cropgen->add_option("--window-s", crop.boundary_window_s)->capture_default_str();
  cropgen->add_flag("--no-intent-delay", cr_no_delay);
  cropgen->add_flag("--emit-audio", cr_audio);
  cropgen->add_option("-o,--output-dir", cr_out)->capture_default_str();

  std::string va_manifest, va_expect;
  auto* validate = app.add_subcommand("validate", "Check manifest integrity and composition");
  validate->add_option("--manifest", va_manifest)->required();
  validate->add_option("--expect", va_expect, "Composition JSON (default: manifest header)");

  std::vector<std::string> rp_inputs;
  std::string rp_format = "text", rp_out;
  bool rp_fan = false;
  auto* report = app.add_subcommand("report", "Render outcome files as one comparison table");
  report->add_option("--outcomes", rp_inputs, "NAME=outcomes.jsonl (repeatable)")->required();
  report->add_option("--format", rp_format, "text | csv | markdown")->capture_default_str();
  report->add_flag("--fan", rp_fan, "Silence/Noise false-alarm table instead");
  report->add_option("--out", rp_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*evaluate) return cmd_evaluate(ev);
    if (*score) return cmd_score(sc_manifest, sc_log, sc_mode, sc_out, sc_name);
    if (*fuse_cmd) return cmd_fuse(fu_ctm, fu_tagged, fu_jsonl, fu_id, fu_ratio, fu_out);
    if (*cropgen) {
      crop.intent_delay = !cr_no_delay;
      return cmd_cropgen(cr_manifest, cr_ctm, crop, cr_out, cr_audio);
    }
    if (*validate) return cmd_validate(va_manifest, va_expect);
    if (*report) return cmd_report(rp_inputs, rp_format, rp_fan, rp_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitConfig;
}

}  // namespace sid
