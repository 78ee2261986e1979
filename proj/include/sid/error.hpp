// include/sid/error.hpp

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

#include <stdexcept>
#include <string>
#include <string_view>

namespace sid {

// Broad failure classes. The CLI maps them onto exit codes.
enum class ErrorKind {
  kConfig,    // bad flags / parameters
  kData,      // malformed or inconsistent input files
  kProtocol,  // external detector misbehaved
  kIo,        // filesystem / socket failures
  kPrecondition,
};

// Distinct failure codes for external detector sessions.
enum class ProtocolCode {
  kNone = 0,
  kConnectFailed,
  kHandshakeTimeout,
  kVersionMismatch,
  kDecisionTimeout,
  kOutOfOrder,
  kMalformedReply,
  kPeerClosed,
};

std::string_view to_string(ErrorKind kind);
std::string_view to_string(ProtocolCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Error(ProtocolCode code, const std::string& what)
      : std::runtime_error(what), kind_(ErrorKind::kProtocol), code_(code) {}

  ErrorKind kind() const { return kind_; }
  ProtocolCode protocol_code() const { return code_; }

 private:
  ErrorKind kind_;
  ProtocolCode code_ = ProtocolCode::kNone;
};

}  // namespace sid
