// include/sid/external_detector.hpp

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
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sid/detector.hpp"
#include "sid/error.hpp"

namespace sid {

enum class Transport { kSubprocess, kTcpConnect };

struct ExternalSpec {
  Transport transport = Transport::kSubprocess;
  // Shell command for kSubprocess, "host:port" for kTcpConnect.
  std::string address_or_cmd;
  int timeout_ms = 2000;
};

// Values announced in the hello message.
struct HelloParams {
  int sample_rate_hz = 16000;
  int chunk_ms = 100;
  FeedMode feed_mode = FeedMode::kIncremental;
};

namespace protocol {

inline constexpr int kVersion = 1;

std::string base64_encode(std::span<const uint8_t> bytes);
// Throws Error(kProtocol, kMalformedReply) on invalid input.
std::vector<uint8_t> base64_decode(std::string_view text);

std::string pcm16le_b64(std::span<const int16_t> samples);
std::vector<int16_t> decode_pcm16le_b64(std::string_view text);

// Serialized messages, without the trailing newline. Key order is fixed.
std::string hello(const HelloParams& p);
std::string hello_ok();
std::string reset(std::string_view session_id);
std::string chunk(uint64_t seq, std::span<const int16_t> samples);
std::string decision(uint64_t seq, bool interrupt);
std::string bye();

}  // namespace protocol

class LineChannel;

// Host side of the newline-delimited JSON detector protocol. The handshake
// runs in attach(); every feed() sends one chunk message and blocks for the
// decision carrying the same sequence number. Any protocol violation throws
// Error(kProtocol) with a specific ProtocolCode and leaves the detector
// unusable.
class ExternalDetector final : public Detector {
 public:
  static std::unique_ptr<ExternalDetector> attach(const ExternalSpec& spec,
                                                  const HelloParams& hello);
  ~ExternalDetector() override;

  ExternalDetector(const ExternalDetector&) = delete;
  ExternalDetector& operator=(const ExternalDetector&) = delete;

  std::string name() const override;
  int sample_rate_hz() const override { return hello_.sample_rate_hz; }
  void reset(const SessionContext& ctx) override;
  bool feed(std::span<const int16_t> samples) override;

  bool broken() const { return broken_; }

 private:
  ExternalDetector(const ExternalSpec& spec, const HelloParams& hello,
                   std::unique_ptr<LineChannel> channel);
  void handshake();
  [[noreturn]] void fail(ProtocolCode code, const std::string& msg);

  ExternalSpec spec_;
  HelloParams hello_;
  std::unique_ptr<LineChannel> channel_;
  uint64_t seq_ = 0;
  bool broken_ = false;
};

std::unique_ptr<Detector> external_attach(const ExternalSpec& spec,
                                          const HelloParams& hello);

}  // namespace sid
