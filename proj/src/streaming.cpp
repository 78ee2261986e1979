// src/streaming.cpp

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

#include "sid/streaming.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

#include <nlohmann/json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sid {

void SessionConfig::validate() const {
  if (chunk_ms < 10 || chunk_ms > 1000)
    throw Error(ErrorKind::kConfig, "chunk_ms must lie in [10, 1000]");
  if (k_consecutive < 1) throw Error(ErrorKind::kConfig, "k_consecutive must be >= 1");
}

std::optional<std::size_t> smooth(const std::vector<bool>& decisions, int k) {
  if (k < 1) throw Error(ErrorKind::kPrecondition, "k must be >= 1");
  std::size_t run = 0;
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    run = decisions[i] ? run + 1 : 0;
    if (run >= static_cast<std::size_t>(k)) return i;
  }
  return std::nullopt;
}

SessionTrace run_session(const EvalInstance& instance, const Audio& audio,
                         Detector& detector, const SessionConfig& config) {
  config.validate();
  const int rate = audio.sample_rate_hz;
  if (rate != detector.sample_rate_hz())
    throw Error(ErrorKind::kData, "instance " + instance.id + ": audio rate " +
                                      std::to_string(rate) + " Hz does not match detector rate " +
                                      std::to_string(detector.sample_rate_hz()) + " Hz");
  if (static_cast<int64_t>(config.chunk_ms) * rate % 1000 != 0)
    throw Error(ErrorKind::kConfig, "chunk_ms does not cover a whole number of samples");
  const std::size_t chunk = static_cast<std::size_t>(int64_t(config.chunk_ms) * rate / 1000);

  const double audio_s = audio.duration_s();
  const double turn_s = instance.turn_duration_s;
  const double horizon_s = std::min(audio_s, turn_s);
  const std::size_t horizon =
      turn_s >= audio_s ? audio.samples.size()
                        : std::min(audio.samples.size(),
                                   static_cast<std::size_t>(std::floor(turn_s * rate)));

  detector.reset({instance.id, config.feed_mode, config.chunk_ms, instance.break_time_s});

  SessionTrace trace;
  if (config.realtime) trace.wall_latencies_ms.emplace();
  const auto t0 = std::chrono::steady_clock::now();
  const std::span<const int16_t> pcm(audio.samples);

  std::size_t run = 0;
  for (std::size_t i = 0; i * chunk < horizon; ++i) {
    const std::size_t begin = i * chunk;
    const std::size_t end = std::min(begin + chunk, horizon);
    const double end_s =
        std::min(static_cast<double>((i + 1) * config.chunk_ms) / 1000.0, horizon_s);

    if (config.realtime)
      std::this_thread::sleep_until(t0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                             std::chrono::duration<double>(end_s)));
    const auto before = std::chrono::steady_clock::now();
    const bool interrupt = config.feed_mode == FeedMode::kCumulative
                               ? detector.feed(pcm.first(end))
                               : detector.feed(pcm.subspan(begin, end - begin));
    const double latency_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - before).count();
    if (trace.wall_latencies_ms) trace.wall_latencies_ms->push_back(latency_ms);

    trace.decisions.push_back({i, end_s, interrupt});
    run = interrupt ? run + 1 : 0;
    if (run >= static_cast<std::size_t>(config.k_consecutive)) {
      double stop = end_s;
      if (config.realtime) stop += latency_ms / 1000.0;
      // A stop issued after the turn already ended never takes effect.
      if (stop <= turn_s) trace.stop.stop_time_s = stop;
      break;
    }
  }
  return trace;
}

SessionTrace run_session(const EvalInstance& instance, Detector& detector,
                         const SessionConfig& config) {
  const Audio audio = read_wav(instance.audio_path);
  return run_session(instance, audio, detector, config);
}

namespace {

SessionResult run_one(const EvalInstance& inst, std::unique_ptr<Detector>& detector,
                      const DetectorFactory& factory, const SessionConfig& config) {
  SessionResult r;
  r.instance_id = inst.id;
  try {
    if (!detector) detector = factory();
    r.trace = run_session(inst, *detector, config);
  } catch (const Error& e) {
    r.error = SessionError{e.kind(), e.protocol_code(), e.what()};
    if (e.kind() == ErrorKind::kProtocol) detector.reset();
  } catch (const std::exception& e) {
    r.error = SessionError{ErrorKind::kIo, ProtocolCode::kNone, e.what()};
    detector.reset();
  }
  return r;
}

}  // namespace

std::vector<SessionResult> run_suite_serial(const std::vector<EvalInstance>& instances,
                                            const DetectorFactory& factory,
                                            const SessionConfig& config) {
  config.validate();
  std::vector<SessionResult> results;
  results.reserve(instances.size());
  std::unique_ptr<Detector> detector;
  for (const auto& inst : instances)
    results.push_back(run_one(inst, detector, factory, config));
  return results;
}

std::vector<SessionResult> run_suite(const std::vector<EvalInstance>& instances,
                                     const DetectorFactory& factory,
                                     const SessionConfig& config, int parallelism) {
  if (parallelism < 1) throw Error(ErrorKind::kConfig, "parallelism must be >= 1");
  config.validate();
#ifdef _OPENMP
  std::vector<SessionResult> results(instances.size());
  const auto n = static_cast<std::ptrdiff_t>(instances.size());
#pragma omp parallel num_threads(parallelism)
  {
    std::unique_ptr<Detector> detector;
#pragma omp for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i)
      results[static_cast<std::size_t>(i)] =
          run_one(instances[static_cast<std::size_t>(i)], detector, factory, config);
  }
  return results;
#else
  (void)parallelism;
  return run_suite_serial(instances, factory, config);
#endif
}

void write_trace_jsonl(std::ostream& os, const std::string& instance_id,
                       const SessionTrace& trace) {
  for (const auto& d : trace.decisions) {
    nlohmann::ordered_json j;
    j["instance_id"] = instance_id;
    j["chunk_index"] = d.chunk_index;
    j["chunk_end_s"] = d.chunk_end_s;
    j["interrupt"] = d.interrupt;
    os << j.dump() << '\n';
  }
}

}  // namespace sid
