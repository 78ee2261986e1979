// include/sid/detector.hpp

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
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sid {

// Incremental: each feed() carries only the new chunk and the detector
// keeps its own history. Cumulative: each feed() carries the whole prefix.
enum class FeedMode { kIncremental, kCumulative };
std::string_view to_string(FeedMode m);
FeedMode parse_feed_mode(std::string_view s);

struct SessionContext {
  std::string session_id;
  FeedMode feed_mode = FeedMode::kIncremental;
  int chunk_ms = 100;
  // Ground truth, visible only to the oracle detector.
  std::optional<double> break_time_s;
};

// Streaming decision maker. One instance serves one session at a time.
class Detector {
 public:
  virtual ~Detector() = default;

  virtual std::string name() const = 0;
  virtual int sample_rate_hz() const = 0;
  // Forget all audio seen so far.
  virtual void reset(const SessionContext& ctx) = 0;
  // Exactly one decision per call: true = Interrupt.
  virtual bool feed(std::span<const int16_t> samples) = 0;
};

// Replies the same decision for every chunk.
class ConstantDetector final : public Detector {
 public:
  ConstantDetector(bool decision, int sample_rate_hz)
      : decision_(decision), rate_(sample_rate_hz) {}

  std::string name() const override { return decision_ ? "always" : "never"; }
  int sample_rate_hz() const override { return rate_; }
  void reset(const SessionContext&) override {}
  bool feed(std::span<const int16_t>) override { return decision_; }

 private:
  bool decision_;
  int rate_;
};

// Harness self-test fixture: true once more audio than the ground-truth
// break time has been heard.
class OracleDetector final : public Detector {
 public:
  explicit OracleDetector(int sample_rate_hz) : rate_(sample_rate_hz) {}

  std::string name() const override { return "oracle"; }
  int sample_rate_hz() const override { return rate_; }
  void reset(const SessionContext& ctx) override;
  bool feed(std::span<const int16_t> samples) override;

 private:
  int rate_;
  FeedMode mode_ = FeedMode::kIncremental;
  std::optional<double> break_time_s_;
  std::size_t samples_seen_ = 0;
};

struct EnergyVadParams {
  int frame_ms = 25;
  int hop_ms = 10;
  double threshold_dbfs = -40.0;
  int min_speech_ms = 100;
  int hangover_ms = 0;

  // Throws Error(kConfig).
  void validate() const;
};

// dBFS of the RMS of `frame`, relative to a 32767 full-scale amplitude.
// Digital silence yields -infinity.
double frame_dbfs(std::span<const int16_t> frame);

// Latching frame-energy VAD: fires once a run of ceil(min_speech_ms/hop_ms)
// consecutive frames exceeds the threshold, then stays on until reset.
class EnergyVad final : public Detector {
 public:
  EnergyVad(const EnergyVadParams& params, int sample_rate_hz);

  std::string name() const override { return "energy"; }
  int sample_rate_hz() const override { return rate_; }
  void reset(const SessionContext& ctx) override;
  bool feed(std::span<const int16_t> samples) override;

  // Sample index at which the triggering frame ended, once latched.
  std::optional<std::size_t> trigger_sample() const { return trigger_sample_; }

  std::size_t frame_samples() const { return frame_; }
  std::size_t hop_samples() const { return hop_; }
  std::size_t run_frames() const { return run_needed_; }

 private:
  void clear();
  void scan();

  EnergyVadParams params_;
  int rate_;
  std::size_t frame_, hop_, run_needed_, hangover_frames_;
  FeedMode mode_ = FeedMode::kIncremental;

  std::vector<int16_t> history_;
  std::size_t next_frame_ = 0;
  std::size_t run_ = 0;
  std::size_t gap_ = 0;
  std::optional<std::size_t> trigger_sample_;
};

}  // namespace sid
