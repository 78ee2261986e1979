// src/error.cpp

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

#include "sid/error.hpp"

namespace sid {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kData: return "data";
    case ErrorKind::kProtocol: return "protocol";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kPrecondition: return "precondition";
  }
  return "unknown";
}

std::string_view to_string(ProtocolCode code) {
  switch (code) {
    case ProtocolCode::kNone: return "none";
    case ProtocolCode::kConnectFailed: return "connect_failed";
    case ProtocolCode::kHandshakeTimeout: return "handshake_timeout";
    case ProtocolCode::kVersionMismatch: return "version_mismatch";
    case ProtocolCode::kDecisionTimeout: return "decision_timeout";
    case ProtocolCode::kOutOfOrder: return "out_of_order";
    case ProtocolCode::kMalformedReply: return "malformed_reply";
    case ProtocolCode::kPeerClosed: return "peer_closed";
  }
  return "unknown";
}

}  // namespace sid
