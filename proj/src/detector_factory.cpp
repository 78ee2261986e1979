// src/detector_factory.cpp

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

#include "sid/detector_factory.hpp"

#include "sid/error.hpp"

namespace sid {

DetectorSpec parse_detector_spec(std::string_view text) {
  DetectorSpec spec;
  using Kind = DetectorSpec::Kind;
  if (text == "oracle") {
    spec.kind = Kind::kOracle;
  } else if (text == "always") {
    spec.kind = Kind::kAlways;
  } else if (text == "never") {
    spec.kind = Kind::kNever;
  } else if (text == "energy") {
    spec.kind = Kind::kEnergy;
  } else if (text.starts_with("external:tcp:")) {
    spec.kind = Kind::kExternal;
    spec.external.transport = Transport::kTcpConnect;
    spec.external.address_or_cmd = std::string(text.substr(13));
  } else if (text.starts_with("external:subprocess:")) {
    spec.kind = Kind::kExternal;
    spec.external.transport = Transport::kSubprocess;
    spec.external.address_or_cmd = std::string(text.substr(20));
  } else {
    throw Error(ErrorKind::kConfig, "unknown detector '" + std::string(text) + "'");
  }
  if (spec.kind == Kind::kExternal && spec.external.address_or_cmd.empty())
    throw Error(ErrorKind::kConfig, "external detector needs an address or command");
  return spec;
}

std::unique_ptr<Detector> make_detector(const DetectorSpec& spec,
                                        const HelloParams& hello) {
  switch (spec.kind) {
    case DetectorSpec::Kind::kOracle:
      return std::make_unique<OracleDetector>(spec.sample_rate_hz);
    case DetectorSpec::Kind::kAlways:
      return std::make_unique<ConstantDetector>(true, spec.sample_rate_hz);
    case DetectorSpec::Kind::kNever:
      return std::make_unique<ConstantDetector>(false, spec.sample_rate_hz);
    case DetectorSpec::Kind::kEnergy:
      return std::make_unique<EnergyVad>(spec.energy, spec.sample_rate_hz);
    case DetectorSpec::Kind::kExternal: {
      HelloParams h = hello;
      h.sample_rate_hz = spec.sample_rate_hz;
      return external_attach(spec.external, h);
    }
  }
  throw Error(ErrorKind::kConfig, "unhandled detector kind");
}

}  // namespace sid
