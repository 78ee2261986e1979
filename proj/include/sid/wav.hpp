// include/sid/wav.hpp

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
#include <span>
#include <vector>

namespace sid {

// Mono PCM16 audio. Only RIFF/WAVE, format tag 1, 16 bits, 1 channel is
// accepted; anything else is rejected rather than converted.
struct Audio {
  int sample_rate_hz = 0;
  std::vector<int16_t> samples;

  double duration_s() const {
    return sample_rate_hz > 0
               ? static_cast<double>(samples.size()) / sample_rate_hz
               : 0.0;
  }
};

struct WavInfo {
  int sample_rate_hz = 0;
  std::size_t num_samples = 0;

  double duration_s() const {
    return static_cast<double>(num_samples) / sample_rate_hz;
  }
};

// Reads only the header chunks.
WavInfo probe_wav(const std::filesystem::path& path);
Audio read_wav(const std::filesystem::path& path);
void write_wav(const std::filesystem::path& path, int sample_rate_hz,
               std::span<const int16_t> samples);

}  // namespace sid
