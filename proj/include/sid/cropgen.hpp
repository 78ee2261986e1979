// include/sid/cropgen.hpp

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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sid/annotation.hpp"
#include "sid/manifest.hpp"

namespace sid {

struct CropConfig {
  int n_clips_per_utt = 6;
  double min_clip_s = 0.5;
  double boundary_window_s = 0.5;
  uint64_t seed = 0;
  // Shift the break to the next word before labeling.
  bool intent_delay = true;

  void validate() const;
};

enum class ClipLabel { kY, kN };
std::string_view to_string(ClipLabel l);

struct ClipSample {
  std::string source_id;
  double start_s = 0.0;  // clips are prefixes
  double end_s = 0.0;
  ClipLabel label = ClipLabel::kN;

  bool operator==(const ClipSample&) const = default;
};

// 64-bit hash of the source id used to derive per-utterance streams.
uint64_t fnv1a64(std::string_view s);
uint64_t splitmix64(uint64_t x);

// Endpoint sampling procedure (stable across versions):
//
//  1. Seed std::mt19937_64 with splitmix64(seed ^ fnv1a64(source_id)).
//  2. unit() = (next() >> 11) * 2^-53, a double in [0, 1).
//  3. Draw n endpoints lo + unit() * (hi - lo) over [min_clip_s, duration];
//     a draw equal to an earlier endpoint is redrawn.
//  4. With a labeling break B' in (min_clip_s, duration): the pre slot is
//     [max(min_clip_s, B' - window), B'], the post slot is
//     (B', min(duration, B' + window)]. If the pre slot is empty, the first
//     endpoint that is not the only post-slot witness is replaced by
//     lo + unit() * (hi - lo) drawn in the pre slot. Then, if the post slot
//     is empty, the first endpoint that is not the only pre-slot witness is
//     replaced by hi - unit() * (hi - lo) drawn in the post slot.
//  5. With B' <= min_clip_s < duration, the pre slot is infeasible: a warning
//     is logged, the post slot becomes (min_clip_s, min(duration,
//     min_clip_s + window)], and endpoints outside it are replaced, first to
//     last, by post-slot draws until two endpoints lie in it.
//  6. Endpoints are sorted ascending. Label Y iff end_s > B'.
std::vector<ClipSample> generate_prefix_clips(std::string_view source_id, double duration_s,
                                              std::optional<double> label_break_s,
                                              const CropConfig& config);

// Derives B' from the instance break (shifted one word when
// config.intent_delay) and samples clips of its audio.
std::vector<ClipSample> generate_clips(const EvalInstance& instance,
                                       const std::vector<WordAlignment>& alignments,
                                       const CropConfig& config);

// Writes out_dir/clips.jsonl ({source_id, start_s, end_s, label[, audio_path]})
// and, with emit_audio, one WAV per clip holding samples
// [floor(start * rate), floor(end * rate)). Returns the manifest path.
std::filesystem::path export_clips(const std::vector<ClipSample>& clips,
                                   const std::vector<EvalInstance>& sources,
                                   const std::filesystem::path& out_dir, bool emit_audio);

}  // namespace sid
