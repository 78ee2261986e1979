// bench/bench_suite.cpp

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

// Serial reference vs OpenMP run_suite on a synthetic corpus.
//   bench_suite --benchmark_filter=Suite

#include <benchmark/benchmark.h>
#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "sid/detector.hpp"
#include "sid/streaming.hpp"
#include "sid/wav.hpp"

namespace {

constexpr int kRate = 16000;

class Corpus {
 public:
  Corpus() {
    dir_ = std::filesystem::temp_directory_path() / ("sid-bench-" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir_);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> hiss(0.0, 30.0);
    for (int i = 0; i < 64; ++i) {
      const double dur = 4.0 + (i % 7);
      std::vector<int16_t> pcm(static_cast<std::size_t>(dur * kRate));
      const std::size_t onset = pcm.size() / 2 + static_cast<std::size_t>(i) * 100;
      for (std::size_t n = 0; n < pcm.size(); ++n) {
        double x = hiss(rng);
        if (n >= onset) x += 4000.0 * std::sin(2 * std::numbers::pi * 250.0 * n / kRate);
        pcm[n] = static_cast<int16_t>(std::lround(x));
      }
      const auto path = dir_ / ("c" + std::to_string(i) + ".wav");
      sid::write_wav(path, kRate, pcm);
      sid::EvalInstance inst;
      inst.id = "c" + std::to_string(i);
      inst.audio_path = path;
      inst.language = sid::Language::kEN;
      inst.category = sid::Category::kInterruptMiddle;
      inst.break_time_s = static_cast<double>(onset) / kRate;
      inst.sample_rate_hz = kRate;
      inst.num_samples = pcm.size();
      inst.turn_duration_s = dur;
      instances_.push_back(inst);
    }
  }
  ~Corpus() {
    std::error_code ec;
    std::filesystem::remove_all(dir_, ec);
  }
  const std::vector<sid::EvalInstance>& instances() const { return instances_; }

 private:
  std::filesystem::path dir_;
  std::vector<sid::EvalInstance> instances_;
};

const Corpus& corpus() {
  static const Corpus c;
  return c;
}

sid::SessionConfig cumulative() {
  // Cumulative feed recomputes the prefix each chunk: the heavy case.
  sid::SessionConfig cfg;
  cfg.feed_mode = sid::FeedMode::kCumulative;
  cfg.k_consecutive = 1000000;  // never stop early: full playback
  return cfg;
}

const sid::DetectorFactory kEnergy = [] {
  return std::make_unique<sid::EnergyVad>(sid::EnergyVadParams{}, kRate);
};

void BM_SuiteSerial(benchmark::State& state) {
  const auto& insts = corpus().instances();
  for (auto _ : state) benchmark::DoNotOptimize(sid::run_suite_serial(insts, kEnergy, cumulative()));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(insts.size()));
}

void BM_SuiteOpenMP(benchmark::State& state) {
  const auto& insts = corpus().instances();
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sid::run_suite(insts, kEnergy, cumulative(), threads));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(insts.size()));
}

}  // namespace

BENCHMARK(BM_SuiteSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SuiteOpenMP)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
