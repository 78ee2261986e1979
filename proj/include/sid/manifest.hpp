// include/sid/manifest.hpp

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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace sid {

enum class Language { kZH, kEN, kNone };

enum class Category {
  kInterruptBeginning,
  kInterruptMiddle,
  kUninterrupted,
  kNoise,
  kSilence,
};

std::string_view to_string(Language lang);
std::string_view to_string(Category cat);
// Throw Error(kData) on unknown names.
Language parse_language(std::string_view s);
Category parse_category(std::string_view s);

inline bool is_interruption(Category c) {
  return c == Category::kInterruptBeginning || c == Category::kInterruptMiddle;
}
inline bool is_non_speech(Category c) {
  return c == Category::kNoise || c == Category::kSilence;
}

// One benchmark case. Immutable once loaded.
struct EvalInstance {
  std::string id;
  std::filesystem::path audio_path;  // resolved against the manifest dir
  Language language = Language::kNone;
  Category category = Category::kUninterrupted;
  std::optional<double> break_time_s;
  double turn_duration_s = 0.0;
  std::optional<std::string> text;
  int sample_rate_hz = 16000;
  std::size_t num_samples = 0;

  double duration_s() const {
    return static_cast<double>(num_samples) / sample_rate_hz;
  }
};

// Throws Error(kData) describing the first violated invariant.
void check_instance(const EvalInstance& inst);

using Bucket = std::pair<Language, Category>;

struct CorpusSummary {
  std::map<Bucket, int64_t> counts;
  int64_t total = 0;
  double total_audio_s = 0.0;
};

struct Discrepancy {
  Bucket bucket;
  int64_t expected = 0;
  int64_t actual = 0;

  bool operator==(const Discrepancy&) const = default;
};

struct ManifestFile {
  std::vector<EvalInstance> instances;
  // Expected composition from the optional header record.
  std::optional<CorpusSummary> declared;
};

// Line-delimited JSON. An optional first line {"header": {"counts": ...}}
// declares the expected composition. Audio headers are probed to fill in
// num_samples / sample_rate_hz and the turn_duration_s default.
ManifestFile load_manifest_file(const std::filesystem::path& path);
std::vector<EvalInstance> load_manifest(const std::filesystem::path& path);

// Inverse of the loader's record parsing; audio_path is written as given.
nlohmann::json instance_to_json(const EvalInstance& inst);

CorpusSummary summarize(const std::vector<EvalInstance>& instances);

// One entry per bucket whose count differs; buckets absent on one side
// count as zero there.
std::vector<Discrepancy> validate_composition(const CorpusSummary& summary,
                                              const CorpusSummary& expected);

// {"counts": {"ZH": {"InterruptBeginning": 500, ...}, "NONE": {...}}}
CorpusSummary composition_from_json(const nlohmann::json& j);
nlohmann::json composition_to_json(const CorpusSummary& s);
CorpusSummary load_composition(const std::filesystem::path& path);

}  // namespace sid
