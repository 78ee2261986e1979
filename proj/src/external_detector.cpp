// src/external_detector.cpp

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

#include "sid/external_detector.hpp"

#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <mutex>
#include <thread>

#include <openssl/evp.h>

#include "sid/error.hpp"

extern char** environ;

namespace sid {

namespace protocol {

std::string base64_encode(std::span<const uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3) + 1, '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                bytes.data(), static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::vector<uint8_t> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0)
    throw Error(ProtocolCode::kMalformedReply, "base64 length not a multiple of 4");
  std::vector<uint8_t> out(3 * text.size() / 4 + 1);
  const int n = EVP_DecodeBlock(out.data(),
                                reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) throw Error(ProtocolCode::kMalformedReply, "invalid base64");
  // EVP_DecodeBlock keeps the zero bytes produced by '=' padding.
  std::size_t len = static_cast<std::size_t>(n);
  if (!text.empty() && text.back() == '=') --len;
  if (text.size() > 1 && text[text.size() - 2] == '=') --len;
  out.resize(len);
  return out;
}

std::string pcm16le_b64(std::span<const int16_t> samples) {
  std::vector<uint8_t> bytes;
  bytes.reserve(samples.size() * 2);
  for (int16_t s : samples) {
    const auto u = static_cast<uint16_t>(s);
    bytes.push_back(static_cast<uint8_t>(u & 0xff));
    bytes.push_back(static_cast<uint8_t>(u >> 8));
  }
  return base64_encode(bytes);
}

std::vector<int16_t> decode_pcm16le_b64(std::string_view text) {
  const auto bytes = base64_decode(text);
  if (bytes.size() % 2 != 0)
    throw Error(ProtocolCode::kMalformedReply, "odd PCM byte count");
  std::vector<int16_t> out(bytes.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = static_cast<int16_t>(bytes[2 * i] | bytes[2 * i + 1] << 8);
  return out;
}

std::string hello(const HelloParams& p) {
  nlohmann::ordered_json j;
  j["type"] = "hello";
  j["version"] = kVersion;
  j["sample_rate_hz"] = p.sample_rate_hz;
  j["chunk_ms"] = p.chunk_ms;
  j["feed_mode"] = to_string(p.feed_mode);
  return j.dump();
}

std::string hello_ok() {
  nlohmann::ordered_json j;
  j["type"] = "hello_ok";
  j["version"] = kVersion;
  return j.dump();
}

std::string reset(std::string_view session_id) {
  nlohmann::ordered_json j;
  j["type"] = "reset";
  j["session_id"] = session_id;
  return j.dump();
}

std::string chunk(uint64_t seq, std::span<const int16_t> samples) {
  nlohmann::ordered_json j;
  j["type"] = "chunk";
  j["seq"] = seq;
  j["pcm16le_b64"] = pcm16le_b64(samples);
  return j.dump();
}

std::string decision(uint64_t seq, bool interrupt) {
  nlohmann::ordered_json j;
  j["type"] = "decision";
  j["seq"] = seq;
  j["interrupt"] = interrupt;
  return j.dump();
}

std::string bye() { return R"({"type":"bye"})"; }

}  // namespace protocol

// Newline-framed duplex byte stream over a pipe pair or a socket.
class LineChannel {
 public:
  LineChannel(int read_fd, int write_fd, bool is_socket, pid_t child)
      : rfd_(read_fd), wfd_(write_fd), socket_(is_socket), child_(child) {}

  ~LineChannel() {
    if (wfd_ >= 0 && wfd_ != rfd_) ::close(wfd_);
    if (rfd_ >= 0) ::close(rfd_);
    if (child_ > 0) reap();
  }

  void write_line(const std::string& line) {
    std::string data = line + "\n";
    const char* p = data.data();
    std::size_t left = data.size();
    while (left > 0) {
      const ssize_t n = socket_ ? ::send(wfd_, p, left, MSG_NOSIGNAL)
                                : ::write(wfd_, p, left);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw Error(ProtocolCode::kPeerClosed,
                    std::string("write to detector failed: ") + std::strerror(errno));
      }
      p += n;
      left -= static_cast<std::size_t>(n);
    }
  }

  // nullopt on timeout; throws kPeerClosed on EOF.
  std::optional<std::string> read_line(int timeout_ms) {
    const auto deadline =
        std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
    while (true) {
      const auto nl = buf_.find('\n');
      if (nl != std::string::npos) {
        std::string line = buf_.substr(0, nl);
        buf_.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                            deadline - std::chrono::steady_clock::now())
                            .count();
      if (left <= 0) return std::nullopt;
      pollfd pfd{rfd_, POLLIN, 0};
      const int r = ::poll(&pfd, 1, static_cast<int>(left));
      if (r < 0) {
        if (errno == EINTR) continue;
        throw Error(ProtocolCode::kPeerClosed, "poll failed");
      }
      if (r == 0) return std::nullopt;
      char tmp[4096];
      const ssize_t n = ::read(rfd_, tmp, sizeof tmp);
      if (n < 0) {
        if (errno == EINTR || errno == EAGAIN) continue;
        throw Error(ProtocolCode::kPeerClosed,
                    std::string("read from detector failed: ") + std::strerror(errno));
      }
      if (n == 0) throw Error(ProtocolCode::kPeerClosed, "detector closed the connection");
      buf_.append(tmp, static_cast<std::size_t>(n));
    }
  }

 private:
  void reap() {
    for (int i = 0; i < 50; ++i) {
      if (::waitpid(child_, nullptr, WNOHANG) != 0) return;
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    ::kill(child_, SIGKILL);
    ::waitpid(child_, nullptr, 0);
  }

  int rfd_, wfd_;
  bool socket_;
  pid_t child_;
  std::string buf_;
};

namespace {

std::unique_ptr<LineChannel> spawn_subprocess(const std::string& cmd) {
  static std::once_flag ignore_sigpipe;
  std::call_once(ignore_sigpipe, [] { ::signal(SIGPIPE, SIG_IGN); });

  int to_child[2], from_child[2];
  if (::pipe2(to_child, O_CLOEXEC) != 0)
    throw Error(ProtocolCode::kConnectFailed, "pipe failed");
  if (::pipe2(from_child, O_CLOEXEC) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    throw Error(ProtocolCode::kConnectFailed, "pipe failed");
  }
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, to_child[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, from_child[1], STDOUT_FILENO);

  std::string sh = "/bin/sh", flag = "-c", command = cmd;
  char* argv[] = {sh.data(), flag.data(), command.data(), nullptr};
  pid_t pid = 0;
  const int rc = ::posix_spawn(&pid, "/bin/sh", &actions, nullptr, argv, environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(to_child[0]);
  ::close(from_child[1]);
  if (rc != 0) {
    ::close(to_child[1]);
    ::close(from_child[0]);
    throw Error(ProtocolCode::kConnectFailed, "cannot spawn '" + cmd + "'");
  }
  return std::make_unique<LineChannel>(from_child[0], to_child[1], false, pid);
}

std::unique_ptr<LineChannel> connect_tcp(const std::string& address, int timeout_ms) {
  const auto colon = address.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == address.size())
    throw Error(ErrorKind::kConfig, "TCP address must be host:port, got '" + address + "'");
  const std::string host = address.substr(0, colon);
  const std::string port = address.substr(colon + 1);

  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (::getaddrinfo(host.c_str(), port.c_str(), &hints, &res) != 0 || !res)
    throw Error(ProtocolCode::kConnectFailed, "cannot resolve " + address);
  std::unique_ptr<addrinfo, decltype(&::freeaddrinfo)> guard(res, ::freeaddrinfo);

  std::string last_error = "no addresses";
  for (addrinfo* ai = res; ai; ai = ai->ai_next) {
    const int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC | SOCK_NONBLOCK,
                            ai->ai_protocol);
    if (fd < 0) continue;
    int rc = ::connect(fd, ai->ai_addr, ai->ai_addrlen);
    if (rc != 0 && errno == EINPROGRESS) {
      pollfd pfd{fd, POLLOUT, 0};
      rc = ::poll(&pfd, 1, timeout_ms) == 1 ? 0 : -1;
      if (rc == 0) {
        int err = 0;
        socklen_t len = sizeof err;
        ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len);
        if (err != 0) {
          errno = err;
          rc = -1;
        }
      } else {
        errno = ETIMEDOUT;
      }
    }
    if (rc == 0) {
      const int flags = ::fcntl(fd, F_GETFL);
      ::fcntl(fd, F_SETFL, flags & ~O_NONBLOCK);
      return std::make_unique<LineChannel>(fd, fd, true, -1);
    }
    last_error = std::strerror(errno);
    ::close(fd);
  }
  throw Error(ProtocolCode::kConnectFailed, "cannot connect to " + address + ": " + last_error);
}

}  // namespace

ExternalDetector::ExternalDetector(const ExternalSpec& spec, const HelloParams& hello,
                                   std::unique_ptr<LineChannel> channel)
    : spec_(spec), hello_(hello), channel_(std::move(channel)) {}

ExternalDetector::~ExternalDetector() {
  if (channel_ && !broken_) {
    try {
      channel_->write_line(protocol::bye());
    } catch (const Error&) {
    }
  }
}

std::unique_ptr<ExternalDetector> ExternalDetector::attach(const ExternalSpec& spec,
                                                           const HelloParams& hello) {
  if (spec.timeout_ms <= 0) throw Error(ErrorKind::kConfig, "timeout_ms must be positive");
  auto channel = spec.transport == Transport::kSubprocess
                     ? spawn_subprocess(spec.address_or_cmd)
                     : connect_tcp(spec.address_or_cmd, spec.timeout_ms);
  std::unique_ptr<ExternalDetector> det(new ExternalDetector(spec, hello, std::move(channel)));
  det->handshake();
  return det;
}

std::string ExternalDetector::name() const {
  return std::string(spec_.transport == Transport::kSubprocess ? "external:subprocess:"
                                                               : "external:tcp:") +
         spec_.address_or_cmd;
}

void ExternalDetector::fail(ProtocolCode code, const std::string& msg) {
  broken_ = true;
  throw Error(code, std::string(to_string(code)) + ": " + msg);
}

void ExternalDetector::handshake() {
  std::optional<std::string> line;
  try {
    channel_->write_line(protocol::hello(hello_));
    line = channel_->read_line(spec_.timeout_ms);
  } catch (const Error& e) {
    fail(e.protocol_code(), e.what());
  }
  if (!line) fail(ProtocolCode::kHandshakeTimeout, "no hello_ok within timeout");
  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(*line);
  } catch (const nlohmann::json::exception&) {
    fail(ProtocolCode::kMalformedReply, "unparseable handshake reply: " + *line);
  }
  if (!reply.is_object()) fail(ProtocolCode::kMalformedReply, "handshake reply not an object");
  if (reply.contains("version") &&
      !(reply["version"].is_number_integer() && reply["version"].get<int>() == protocol::kVersion))
    fail(ProtocolCode::kVersionMismatch, "peer speaks version " + reply["version"].dump());
  if (reply.value("type", "") != "hello_ok" || !reply.contains("version"))
    fail(ProtocolCode::kMalformedReply, "expected hello_ok, got " + *line);
}

void ExternalDetector::reset(const SessionContext& ctx) {
  if (broken_) fail(ProtocolCode::kPeerClosed, "detector connection already failed");
  seq_ = 0;
  try {
    channel_->write_line(protocol::reset(ctx.session_id));
  } catch (const Error& e) {
    fail(e.protocol_code(), e.what());
  }
}

bool ExternalDetector::feed(std::span<const int16_t> samples) {
  if (broken_) fail(ProtocolCode::kPeerClosed, "detector connection already failed");
  const uint64_t seq = seq_++;
  std::optional<std::string> line;
  try {
    channel_->write_line(protocol::chunk(seq, samples));
    line = channel_->read_line(spec_.timeout_ms);
  } catch (const Error& e) {
    fail(e.protocol_code(), e.what());
  }
  if (!line) fail(ProtocolCode::kDecisionTimeout, "no decision for seq " + std::to_string(seq));
  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(*line);
  } catch (const nlohmann::json::exception&) {
    fail(ProtocolCode::kMalformedReply, "unparseable decision: " + *line);
  }
  if (!reply.is_object() || reply.value("type", "") != "decision" ||
      !reply.contains("seq") || !reply["seq"].is_number_integer() ||
      !reply.contains("interrupt") || !reply["interrupt"].is_boolean())
    fail(ProtocolCode::kMalformedReply, "expected decision, got " + *line);
  const auto got = reply["seq"].get<int64_t>();
  if (got != static_cast<int64_t>(seq))
    fail(ProtocolCode::kOutOfOrder,
         "expected seq " + std::to_string(seq) + ", got " + std::to_string(got));
  return reply["interrupt"].get<bool>();
}

std::unique_ptr<Detector> external_attach(const ExternalSpec& spec, const HelloParams& hello) {
  return ExternalDetector::attach(spec, hello);
}

}  // namespace sid
