// src/cropgen.cpp

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

#include "sid/cropgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "sid/error.hpp"
#include "sid/wav.hpp"

namespace sid {

void CropConfig::validate() const {
  if (n_clips_per_utt < 1) throw Error(ErrorKind::kConfig, "n_clips_per_utt must be >= 1");
  if (!(min_clip_s > 0.0)) throw Error(ErrorKind::kConfig, "min_clip_s must be positive");
  if (!(boundary_window_s > 0.0))
    throw Error(ErrorKind::kConfig, "boundary_window_s must be positive");
}

std::string_view to_string(ClipLabel l) { return l == ClipLabel::kY ? "Y" : "N"; }

uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

class EndpointStream {
 public:
  explicit EndpointStream(uint64_t seed) : engine_(seed) {}
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // [lo, hi)
  double closed_open(double lo, double hi) { return lo + unit() * (hi - lo); }
  // (lo, hi]
  double open_closed(double lo, double hi) { return hi - unit() * (hi - lo); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace

std::vector<ClipSample> generate_prefix_clips(std::string_view source_id, double duration_s,
                                              std::optional<double> label_break_s,
                                              const CropConfig& config) {
  config.validate();
  if (duration_s < config.min_clip_s)
    throw Error(ErrorKind::kData, std::string(source_id) + ": duration shorter than min_clip_s");
  if (label_break_s && config.n_clips_per_utt < 2)
    throw Error(ErrorKind::kConfig, "n_clips_per_utt must be >= 2 for utterances with a break");

  const auto n = static_cast<std::size_t>(config.n_clips_per_utt);
  EndpointStream rng(splitmix64(config.seed ^ fnv1a64(source_id)));
  std::vector<double> ends;
  ends.reserve(n);

  auto taken = [&](double v, std::size_t skip) {
    for (std::size_t i = 0; i < ends.size(); ++i)
      if (i != skip && ends[i] == v) return true;
    return false;
  };
  constexpr int kMaxRedraws = 64;
  auto fresh = [&](auto&& draw, std::size_t skip) {
    for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
      const double v = draw();
      if (!taken(v, skip)) return v;
    }
    throw Error(ErrorKind::kData, std::string(source_id) + ": cannot draw distinct endpoints");
  };

  for (std::size_t i = 0; i < n; ++i)
    ends.push_back(fresh([&] { return rng.closed_open(config.min_clip_s, duration_s); }, n));

  if (label_break_s && *label_break_s < duration_s) {
    const double b = *label_break_s;
    // An early break cannot drag the post slot below the shortest clip.
    const double post_lo = std::max(b, config.min_clip_s);
    const double post_hi = std::min(duration_s, post_lo + config.boundary_window_s);
    auto in_post = [&](double v) { return v > post_lo && v <= post_hi; };
    auto post_draw = [&] { return rng.open_closed(post_lo, post_hi); };

    if (b > config.min_clip_s) {
      const double pre_lo = std::max(config.min_clip_s, b - config.boundary_window_s), pre_hi = b;
      auto in_pre = [&](double v) { return v >= pre_lo && v <= pre_hi; };
      auto count = [&](auto&& pred) {
        return static_cast<std::size_t>(std::count_if(ends.begin(), ends.end(), pred));
      };
      // First endpoint whose replacement keeps the other slot witnessed.
      auto victim = [&](auto&& other) {
        const bool sole = count(other) == 1;
        for (std::size_t i = 0; i < n; ++i)
          if (!(sole && other(ends[i]))) return i;
        return std::size_t{0};
      };
      if (count(in_pre) == 0) {
        const std::size_t i = victim(in_post);
        ends[i] = fresh([&] { return rng.closed_open(pre_lo, pre_hi); }, i);
      }
      if (count(in_post) == 0) {
        const std::size_t i = victim(in_pre);
        ends[i] = fresh(post_draw, i);
      }
    } else {
      spdlog::warn("{}: break at {:.3f}s leaves no room for a pre-break clip; "
                   "placing both boundary clips after it",
                   source_id, b);
      for (std::size_t i = 0; i < n; ++i) {
        if (std::count_if(ends.begin(), ends.end(), in_post) >= 2) break;
        if (!in_post(ends[i])) ends[i] = fresh(post_draw, i);
      }
    }
  }

  std::sort(ends.begin(), ends.end());
  std::vector<ClipSample> clips;
  clips.reserve(n);
  for (double e : ends) {
    const bool positive = label_break_s && e > *label_break_s;
    clips.push_back({std::string(source_id), 0.0, e, positive ? ClipLabel::kY : ClipLabel::kN});
  }
  return clips;
}

std::vector<ClipSample> generate_clips(const EvalInstance& instance,
                                       const std::vector<WordAlignment>& alignments,
                                       const CropConfig& config) {
  std::optional<double> label_break = instance.break_time_s;
  if (label_break && config.intent_delay)
    label_break = apply_intent_delay(*label_break, alignments);
  return generate_prefix_clips(instance.id, instance.duration_s(), label_break, config);
}

std::filesystem::path export_clips(const std::vector<ClipSample>& clips,
                                   const std::vector<EvalInstance>& sources,
                                   const std::filesystem::path& out_dir, bool emit_audio) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + out_dir.string() + ": " + ec.message());

  std::map<std::string_view, const EvalInstance*> by_id;
  for (const auto& s : sources) by_id.emplace(s.id, &s);

  const auto manifest = out_dir / "clips.jsonl";
  std::ofstream os(manifest, std::ios::trunc);
  if (!os) throw Error(ErrorKind::kIo, "cannot write " + manifest.string());

  std::map<std::string, Audio> cache;
  std::map<std::string, int> per_source;
  for (const auto& clip : clips) {
    auto it = by_id.find(clip.source_id);
    if (it == by_id.end())
      throw Error(ErrorKind::kData, "clip source '" + clip.source_id + "' not in manifest");
    const EvalInstance& src = *it->second;
    if (clip.start_s < 0.0 || clip.end_s <= clip.start_s || clip.end_s > src.duration_s())
      throw Error(ErrorKind::kData, "clip [" + std::to_string(clip.start_s) + ", " +
                                        std::to_string(clip.end_s) + "] outside source " +
                                        src.id);
    nlohmann::ordered_json j;
    j["source_id"] = clip.source_id;
    j["start_s"] = clip.start_s;
    j["end_s"] = clip.end_s;
    j["label"] = to_string(clip.label);
    if (emit_audio) {
      auto [ait, fresh] = cache.try_emplace(src.id);
      if (fresh) ait->second = read_wav(src.audio_path);
      const Audio& audio = ait->second;
      const auto begin = static_cast<std::size_t>(std::floor(clip.start_s * audio.sample_rate_hz));
      const auto end = static_cast<std::size_t>(std::floor(clip.end_s * audio.sample_rate_hz));
      if (end > audio.samples.size())
        throw Error(ErrorKind::kData, "clip slice past end of " + src.audio_path.string());
      const std::string name =
          src.id + "_clip" + std::to_string(per_source[src.id]++) + ".wav";
      write_wav(out_dir / name, audio.sample_rate_hz,
                std::span(audio.samples).subspan(begin, end - begin));
      j["audio_path"] = name;
    }
    os << j.dump() << '\n';
  }
  if (!os) throw Error(ErrorKind::kIo, "write failed: " + manifest.string());
  return manifest;
}

}  // namespace sid
