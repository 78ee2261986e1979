// include/sid/streaming.hpp

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
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sid/detector.hpp"
#include "sid/detector_factory.hpp"
#include "sid/error.hpp"
#include "sid/manifest.hpp"
#include "sid/metrics.hpp"
#include "sid/wav.hpp"

namespace sid {

struct SessionConfig {
  int chunk_ms = 100;
  int k_consecutive = 3;
  // Pace chunks by the wall clock and add measured decision latency to the
  // stop time. Off: logical audio time only.
  bool realtime = false;
  FeedMode feed_mode = FeedMode::kIncremental;

  // Throws Error(kConfig).
  void validate() const;
};

struct ChunkDecision {
  std::size_t chunk_index = 0;
  double chunk_end_s = 0.0;
  bool interrupt = false;

  bool operator==(const ChunkDecision&) const = default;
};

struct SessionTrace {
  std::vector<ChunkDecision> decisions;  // one per delivered chunk
  StopEvent stop;
  std::optional<std::vector<double>> wall_latencies_ms;

  bool same_decisions(const SessionTrace& o) const {
    return decisions == o.decisions && stop.stop_time_s == o.stop.stop_time_s;
  }
};

// Smallest i with decisions[i-k+1..i] all true.
std::optional<std::size_t> smooth(const std::vector<bool>& decisions, int k);

// Replays `audio` chunk by chunk. Playback covers min(audio duration,
// turn_duration_s) and halts right after the chunk that completes a run of
// k_consecutive Interrupt decisions; the stop lands at that chunk's end.
// The detector is reset at the start of the session.
SessionTrace run_session(const EvalInstance& instance, const Audio& audio,
                         Detector& detector, const SessionConfig& config);
// Same, decoding instance.audio_path.
SessionTrace run_session(const EvalInstance& instance, Detector& detector,
                         const SessionConfig& config);

struct SessionError {
  ErrorKind kind = ErrorKind::kData;
  ProtocolCode code = ProtocolCode::kNone;
  std::string message;
};

struct SessionResult {
  std::string instance_id;
  std::optional<SessionTrace> trace;  // absent iff error
  std::optional<SessionError> error;
};

// One result per instance, in instance order. Each worker builds its own
// detector through `factory`; a detector that fails with a protocol error
// is discarded and rebuilt for the next instance. Session failures are
// recorded per result and never abort the suite.
std::vector<SessionResult> run_suite(const std::vector<EvalInstance>& instances,
                                     const DetectorFactory& factory,
                                     const SessionConfig& config, int parallelism);

// Reference single-threaded implementation of run_suite.
std::vector<SessionResult> run_suite_serial(const std::vector<EvalInstance>& instances,
                                            const DetectorFactory& factory,
                                            const SessionConfig& config);

// {instance_id, chunk_index, chunk_end_s, interrupt} per line.
void write_trace_jsonl(std::ostream& os, const std::string& instance_id,
                       const SessionTrace& trace);

}  // namespace sid
