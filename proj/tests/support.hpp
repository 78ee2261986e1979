// tests/support.hpp

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

// Shared fixtures for the unit and acceptance suites.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

#include <nlohmann/json.hpp>

#include "sid/manifest.hpp"
#include "sid/wav.hpp"

namespace sid::test {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("sid-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::vector<int16_t> sine(double seconds, double freq_hz, double amplitude,
                                 int rate = 16000) {
  std::vector<int16_t> out(static_cast<std::size_t>(std::llround(seconds * rate)));
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = static_cast<int16_t>(std::lround(
        amplitude * std::sin(2.0 * std::numbers::pi * freq_hz * static_cast<double>(i) / rate)));
  return out;
}

inline std::vector<int16_t> zeros(double seconds, int rate = 16000) {
  return std::vector<int16_t>(static_cast<std::size_t>(std::llround(seconds * rate)), 0);
}

// Gaussian noise with the given RMS in sample units.
inline std::vector<int16_t> noise(double seconds, double rms, uint64_t seed, int rate = 16000) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, rms);
  std::vector<int16_t> out(static_cast<std::size_t>(std::llround(seconds * rate)));
  for (auto& s : out) s = static_cast<int16_t>(std::clamp(std::lround(dist(rng)), -32768L, 32767L));
  return out;
}

// In-memory instance without a backing file.
inline EvalInstance make_instance(std::string id, double duration_s,
                                  std::optional<double> break_s,
                                  std::optional<double> turn_s = std::nullopt,
                                  Language lang = Language::kEN, int rate = 16000) {
  EvalInstance inst;
  inst.id = std::move(id);
  inst.language = lang;
  inst.category = break_s ? Category::kInterruptMiddle
                          : (lang == Language::kNone ? Category::kSilence
                                                     : Category::kUninterrupted);
  inst.break_time_s = break_s;
  inst.sample_rate_hz = rate;
  inst.num_samples = static_cast<std::size_t>(std::llround(duration_s * rate));
  inst.turn_duration_s = turn_s.value_or(inst.duration_s());
  return inst;
}

struct ManifestLine {
  std::string id;
  std::string audio;
  std::string language;
  std::string category;
  std::optional<double> break_time_s;
  std::optional<double> turn_duration_s;
};

inline void write_manifest(const std::filesystem::path& path,
                           const std::vector<ManifestLine>& lines,
                           const std::optional<nlohmann::json>& header = std::nullopt) {
  std::ofstream os(path);
  if (header) os << nlohmann::json{{"header", *header}}.dump() << "\n";
  for (const auto& l : lines) {
    nlohmann::json j{{"id", l.id}, {"audio_path", l.audio}, {"language", l.language},
                     {"category", l.category}};
    if (l.break_time_s) j["break_time_s"] = *l.break_time_s;
    if (l.turn_duration_s) j["turn_duration_s"] = *l.turn_duration_s;
    os << j.dump() << "\n";
  }
}

}  // namespace sid::test
