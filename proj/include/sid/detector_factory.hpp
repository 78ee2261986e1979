// include/sid/detector_factory.hpp

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

#include <functional>
#include <memory>
#include <string>
#include <string_view>

#include "sid/detector.hpp"
#include "sid/external_detector.hpp"

namespace sid {

struct DetectorSpec {
  enum class Kind { kOracle, kAlways, kNever, kEnergy, kExternal };

  Kind kind = Kind::kOracle;
  int sample_rate_hz = 16000;
  EnergyVadParams energy;
  ExternalSpec external;
};

// "oracle" | "always" | "never" | "energy" | "external:tcp:HOST:PORT" |
// "external:subprocess:COMMAND". Parameters other than the transport are
// left at their defaults.
DetectorSpec parse_detector_spec(std::string_view text);

std::unique_ptr<Detector> make_detector(const DetectorSpec& spec,
                                        const HelloParams& hello);

using DetectorFactory = std::function<std::unique_ptr<Detector>()>;

}  // namespace sid
