// src/detector.cpp

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

#include "sid/detector.hpp"

#include <cmath>
#include <limits>

#include "sid/error.hpp"

namespace sid {

std::string_view to_string(FeedMode m) {
  return m == FeedMode::kIncremental ? "incremental" : "cumulative";
}

FeedMode parse_feed_mode(std::string_view s) {
  if (s == "incremental" || s == "Incremental") return FeedMode::kIncremental;
  if (s == "cumulative" || s == "Cumulative") return FeedMode::kCumulative;
  throw Error(ErrorKind::kConfig, "unknown feed mode '" + std::string(s) + "'");
}

void OracleDetector::reset(const SessionContext& ctx) {
  mode_ = ctx.feed_mode;
  break_time_s_ = ctx.break_time_s;
  samples_seen_ = 0;
}

bool OracleDetector::feed(std::span<const int16_t> samples) {
  if (mode_ == FeedMode::kCumulative)
    samples_seen_ = samples.size();
  else
    samples_seen_ += samples.size();
  if (!break_time_s_) return false;
  return static_cast<double>(samples_seen_) / rate_ > *break_time_s_;
}

void EnergyVadParams::validate() const {
  if (hop_ms <= 0) throw Error(ErrorKind::kConfig, "hop_ms must be positive");
  if (frame_ms < hop_ms) throw Error(ErrorKind::kConfig, "frame_ms must be >= hop_ms");
  if (min_speech_ms < hop_ms)
    throw Error(ErrorKind::kConfig, "min_speech_ms must be >= hop_ms");
  if (hangover_ms < 0) throw Error(ErrorKind::kConfig, "hangover_ms must be >= 0");
  if (!std::isfinite(threshold_dbfs))
    throw Error(ErrorKind::kConfig, "threshold_dbfs must be finite");
}

double frame_dbfs(std::span<const int16_t> frame) {
  if (frame.empty()) return -std::numeric_limits<double>::infinity();
  double sum_sq = 0.0;
  for (int16_t s : frame) sum_sq += static_cast<double>(s) * s;
  const double mean_sq = sum_sq / static_cast<double>(frame.size());
  if (mean_sq == 0.0) return -std::numeric_limits<double>::infinity();
  constexpr double kFullScale = 32767.0;
  return 10.0 * std::log10(mean_sq / (kFullScale * kFullScale));
}

EnergyVad::EnergyVad(const EnergyVadParams& params, int sample_rate_hz)
    : params_(params), rate_(sample_rate_hz) {
  params_.validate();
  if (rate_ <= 0) throw Error(ErrorKind::kConfig, "sample rate must be positive");
  frame_ = static_cast<std::size_t>(int64_t(params_.frame_ms) * rate_ / 1000);
  hop_ = static_cast<std::size_t>(int64_t(params_.hop_ms) * rate_ / 1000);
  if (frame_ == 0 || hop_ == 0)
    throw Error(ErrorKind::kConfig, "frame/hop shorter than one sample");
  run_needed_ = static_cast<std::size_t>(
      (params_.min_speech_ms + params_.hop_ms - 1) / params_.hop_ms);
  hangover_frames_ = static_cast<std::size_t>(params_.hangover_ms / params_.hop_ms);
}

void EnergyVad::clear() {
  history_.clear();
  next_frame_ = 0;
  run_ = 0;
  gap_ = 0;
  trigger_sample_.reset();
}

void EnergyVad::reset(const SessionContext& ctx) {
  mode_ = ctx.feed_mode;
  clear();
}

void EnergyVad::scan() {
  while (!trigger_sample_ && next_frame_ * hop_ + frame_ <= history_.size()) {
    const std::size_t begin = next_frame_ * hop_;
    const double db = frame_dbfs(std::span(history_).subspan(begin, frame_));
    if (db > params_.threshold_dbfs) {
      ++run_;
      gap_ = 0;
    } else if (run_ > 0 && gap_ < hangover_frames_) {
      ++gap_;
    } else {
      run_ = 0;
      gap_ = 0;
    }
    if (run_ >= run_needed_) trigger_sample_ = begin + frame_;
    ++next_frame_;
  }
}

bool EnergyVad::feed(std::span<const int16_t> samples) {
  if (mode_ == FeedMode::kCumulative) {
    // Prefix-defined: recompute from scratch over the whole prefix.
    if (samples.size() < history_.size())
      throw Error(ErrorKind::kPrecondition, "cumulative feed shrank");
    clear();
    history_.assign(samples.begin(), samples.end());
  } else {
    history_.insert(history_.end(), samples.begin(), samples.end());
  }
  scan();
  return trigger_sample_.has_value();
}

}  // namespace sid
