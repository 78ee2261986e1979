// src/manifest.cpp

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

#include "sid/manifest.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "sid/error.hpp"
#include "sid/wav.hpp"

namespace sid {
namespace {

constexpr std::pair<Language, std::string_view> kLanguages[] = {
    {Language::kZH, "ZH"}, {Language::kEN, "EN"}, {Language::kNone, "NONE"}};

constexpr std::pair<Category, std::string_view> kCategories[] = {
    {Category::kInterruptBeginning, "InterruptBeginning"},
    {Category::kInterruptMiddle, "InterruptMiddle"},
    {Category::kUninterrupted, "Uninterrupted"},
    {Category::kNoise, "Noise"},
    {Category::kSilence, "Silence"},
};

double require_seconds(const nlohmann::json& rec, const char* key) {
  const auto& v = rec.at(key);
  if (!v.is_number()) throw Error(ErrorKind::kData, std::string(key) + " must be a number");
  return v.get<double>();
}

EvalInstance parse_record(const nlohmann::json& rec,
                          const std::filesystem::path& base_dir) {
  if (!rec.is_object()) throw Error(ErrorKind::kData, "record is not an object");
  for (const char* key : {"id", "audio_path", "language", "category"})
    if (!rec.contains(key)) throw Error(ErrorKind::kData, std::string("missing field ") + key);

  EvalInstance inst;
  inst.id = rec.at("id").get<std::string>();
  if (inst.id.empty()) throw Error(ErrorKind::kData, "empty id");
  std::filesystem::path audio = rec.at("audio_path").get<std::string>();
  inst.audio_path = audio.is_absolute() ? audio : base_dir / audio;
  inst.language = parse_language(rec.at("language").get<std::string>());
  inst.category = parse_category(rec.at("category").get<std::string>());
  if (rec.contains("break_time_s") && !rec["break_time_s"].is_null())
    inst.break_time_s = require_seconds(rec, "break_time_s");
  if (rec.contains("text") && !rec["text"].is_null())
    inst.text = rec["text"].get<std::string>();

  if (!std::filesystem::exists(inst.audio_path))
    throw Error(ErrorKind::kData, "missing audio file " + inst.audio_path.string());
  const WavInfo info = probe_wav(inst.audio_path);
  inst.sample_rate_hz = info.sample_rate_hz;
  inst.num_samples = info.num_samples;
  if (rec.contains("sample_rate_hz") && !rec["sample_rate_hz"].is_null()) {
    const int declared = rec["sample_rate_hz"].get<int>();
    if (declared != info.sample_rate_hz)
      throw Error(ErrorKind::kData,
                  "sample_rate_hz " + std::to_string(declared) +
                      " does not match WAV rate " +
                      std::to_string(info.sample_rate_hz));
  }
  if (rec.contains("turn_duration_s") && !rec["turn_duration_s"].is_null())
    inst.turn_duration_s = require_seconds(rec, "turn_duration_s");
  else
    inst.turn_duration_s = inst.duration_s();

  check_instance(inst);
  return inst;
}

}  // namespace

std::string_view to_string(Language lang) {
  for (auto [l, s] : kLanguages)
    if (l == lang) return s;
  return "?";
}

std::string_view to_string(Category cat) {
  for (auto [c, s] : kCategories)
    if (c == cat) return s;
  return "?";
}

Language parse_language(std::string_view s) {
  for (auto [l, name] : kLanguages)
    if (name == s) return l;
  throw Error(ErrorKind::kData, "unknown language '" + std::string(s) + "'");
}

Category parse_category(std::string_view s) {
  for (auto [c, name] : kCategories)
    if (name == s) return c;
  throw Error(ErrorKind::kData, "unknown category '" + std::string(s) + "'");
}

void check_instance(const EvalInstance& inst) {
  auto fail = [&](const std::string& msg) {
    throw Error(ErrorKind::kData, "instance " + inst.id + ": " + msg);
  };
  if (inst.sample_rate_hz <= 0) fail("sample_rate_hz must be positive");
  if (!(inst.turn_duration_s > 0.0)) fail("turn_duration_s must be positive");
  if (is_non_speech(inst.category) && inst.language != Language::kNone)
    fail("Noise/Silence instances must have language NONE");
  if (inst.break_time_s) {
    if (!is_interruption(inst.category))
      fail("break_time forbidden for category " +
           std::string(to_string(inst.category)));
    const double b = *inst.break_time_s;
    if (b < 0.0) fail("break_time_s must be non-negative");
    if (!(b < inst.duration_s())) fail("break_time_s must precede the end of the audio");
    if (!(b < inst.turn_duration_s)) fail("break_time_s must precede the end of the turn");
  } else if (is_interruption(inst.category)) {
    fail("break_time_s required for category " +
         std::string(to_string(inst.category)));
  }
}

ManifestFile load_manifest_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::kIo, "cannot open manifest " + path.string());
  const std::filesystem::path base = path.parent_path();

  ManifestFile out;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
    try {
      const auto rec = nlohmann::json::parse(line);
      if (rec.is_object() && rec.contains("header")) {
        if (!out.instances.empty() || out.declared)
          throw Error(ErrorKind::kData, "header record must be the first line");
        out.declared = composition_from_json(rec["header"]);
        continue;
      }
      EvalInstance inst = parse_record(rec, base);
      if (!seen.insert(inst.id).second)
        throw Error(ErrorKind::kData, "duplicate id " + inst.id);
      out.instances.push_back(std::move(inst));
    } catch (const Error& e) {
      throw Error(e.kind(), where + e.what());
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kData, where + "malformed record: " + e.what());
    }
  }
  return out;
}

std::vector<EvalInstance> load_manifest(const std::filesystem::path& path) {
  return load_manifest_file(path).instances;
}

nlohmann::json instance_to_json(const EvalInstance& inst) {
  nlohmann::json j;
  j["id"] = inst.id;
  j["audio_path"] = inst.audio_path.string();
  j["language"] = to_string(inst.language);
  j["category"] = to_string(inst.category);
  j["break_time_s"] = inst.break_time_s ? nlohmann::json(*inst.break_time_s)
                                        : nlohmann::json(nullptr);
  j["turn_duration_s"] = inst.turn_duration_s;
  if (inst.text) j["text"] = *inst.text;
  j["sample_rate_hz"] = inst.sample_rate_hz;
  return j;
}

CorpusSummary summarize(const std::vector<EvalInstance>& instances) {
  CorpusSummary s;
  for (const auto& inst : instances) {
    ++s.counts[{inst.language, inst.category}];
    s.total_audio_s += inst.duration_s();
  }
  s.total = static_cast<int64_t>(instances.size());
  return s;
}

std::vector<Discrepancy> validate_composition(const CorpusSummary& summary,
                                              const CorpusSummary& expected) {
  std::set<Bucket> keys;
  for (const auto& [k, v] : summary.counts) keys.insert(k);
  for (const auto& [k, v] : expected.counts) keys.insert(k);
  auto get = [](const CorpusSummary& s, const Bucket& k) -> int64_t {
    auto it = s.counts.find(k);
    return it == s.counts.end() ? 0 : it->second;
  };
  std::vector<Discrepancy> out;
  for (const auto& k : keys) {
    const int64_t want = get(expected, k);
    const int64_t have = get(summary, k);
    if (want != have) out.push_back({k, want, have});
  }
  return out;
}

CorpusSummary composition_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("counts") || !j["counts"].is_object())
    throw Error(ErrorKind::kData, "composition must be an object with \"counts\"");
  CorpusSummary s;
  for (const auto& [lang, cats] : j["counts"].items()) {
    const Language l = parse_language(lang);
    if (!cats.is_object()) throw Error(ErrorKind::kData, "counts." + lang + " must be an object");
    for (const auto& [cat, n] : cats.items()) {
      const int64_t count = n.get<int64_t>();
      if (count < 0) throw Error(ErrorKind::kData, "negative count");
      if (count > 0) s.counts[{l, parse_category(cat)}] = count;
      s.total += count;
    }
  }
  if (j.contains("total") && j["total"].get<int64_t>() != s.total)
    throw Error(ErrorKind::kData, "composition total does not match the sum of counts");
  return s;
}

nlohmann::json composition_to_json(const CorpusSummary& s) {
  nlohmann::json counts = nlohmann::json::object();
  for (const auto& [bucket, n] : s.counts)
    counts[std::string(to_string(bucket.first))][std::string(to_string(bucket.second))] = n;
  return {{"counts", counts}, {"total", s.total}};
}

CorpusSummary load_composition(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  try {
    return composition_from_json(nlohmann::json::parse(is));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kData, path.string() + ": " + e.what());
  }
}

}  // namespace sid
