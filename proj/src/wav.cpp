// src/wav.cpp

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

#include "sid/wav.hpp"

#include <array>
#include <cstring>
#include <fstream>

#include "sid/error.hpp"

namespace sid {
namespace {

uint32_t le32(const unsigned char* p) {
  return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 |
         uint32_t(p[3]) << 24;
}
uint16_t le16(const unsigned char* p) { return uint16_t(p[0] | p[1] << 8); }

void put32(std::ostream& os, uint32_t v) {
  const char b[4] = {char(v & 0xff), char(v >> 8 & 0xff), char(v >> 16 & 0xff),
                     char(v >> 24 & 0xff)};
  os.write(b, 4);
}
void put16(std::ostream& os, uint16_t v) {
  const char b[2] = {char(v & 0xff), char(v >> 8 & 0xff)};
  os.write(b, 2);
}

struct Layout {
  WavInfo info;
  std::streamoff data_offset = 0;
};

Layout parse_header(std::istream& is, const std::filesystem::path& path) {
  auto fail = [&](const std::string& msg) -> Error {
    return Error(ErrorKind::kData, path.string() + ": " + msg);
  };
  std::array<unsigned char, 12> riff{};
  if (!is.read(reinterpret_cast<char*>(riff.data()), riff.size()))
    throw fail("truncated RIFF header");
  if (std::memcmp(riff.data(), "RIFF", 4) != 0 ||
      std::memcmp(riff.data() + 8, "WAVE", 4) != 0)
    throw fail("not a RIFF/WAVE file");

  Layout out;
  bool have_fmt = false;
  while (true) {
    std::array<unsigned char, 8> hdr{};
    if (!is.read(reinterpret_cast<char*>(hdr.data()), hdr.size()))
      throw fail("missing data chunk");
    const uint32_t size = le32(hdr.data() + 4);
    if (std::memcmp(hdr.data(), "fmt ", 4) == 0) {
      if (size < 16) throw fail("short fmt chunk");
      std::vector<unsigned char> fmt(size);
      if (!is.read(reinterpret_cast<char*>(fmt.data()), size))
        throw fail("truncated fmt chunk");
      const uint16_t tag = le16(&fmt[0]);
      const uint16_t channels = le16(&fmt[2]);
      const uint32_t rate = le32(&fmt[4]);
      const uint16_t bits = le16(&fmt[14]);
      if (tag != 1) throw fail("only PCM (format 1) is supported");
      if (channels != 1) throw fail("only mono audio is supported");
      if (bits != 16) throw fail("only 16-bit samples are supported");
      if (rate == 0) throw fail("zero sample rate");
      out.info.sample_rate_hz = static_cast<int>(rate);
      have_fmt = true;
      if (size & 1) is.ignore(1);
    } else if (std::memcmp(hdr.data(), "data", 4) == 0) {
      if (!have_fmt) throw fail("data chunk before fmt chunk");
      if (size % 2 != 0) throw fail("odd data chunk size");
      out.info.num_samples = size / 2;
      out.data_offset = is.tellg();
      return out;
    } else {
      is.ignore(size + (size & 1));
    }
  }
}

}  // namespace

WavInfo probe_wav(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  return parse_header(is, path).info;
}

Audio read_wav(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  const Layout layout = parse_header(is, path);
  std::vector<unsigned char> raw(layout.info.num_samples * 2);
  if (!is.read(reinterpret_cast<char*>(raw.data()),
               static_cast<std::streamsize>(raw.size())))
    throw Error(ErrorKind::kData, path.string() + ": truncated sample data");
  Audio audio;
  audio.sample_rate_hz = layout.info.sample_rate_hz;
  audio.samples.resize(layout.info.num_samples);
  for (std::size_t i = 0; i < audio.samples.size(); ++i)
    audio.samples[i] = static_cast<int16_t>(le16(&raw[2 * i]));
  return audio;
}

void write_wav(const std::filesystem::path& path, int sample_rate_hz,
               std::span<const int16_t> samples) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  const uint32_t data_bytes = static_cast<uint32_t>(samples.size() * 2);
  os.write("RIFF", 4);
  put32(os, 36 + data_bytes);
  os.write("WAVEfmt ", 8);
  put32(os, 16);
  put16(os, 1);
  put16(os, 1);
  put32(os, static_cast<uint32_t>(sample_rate_hz));
  put32(os, static_cast<uint32_t>(sample_rate_hz) * 2);
  put16(os, 2);
  put16(os, 16);
  os.write("data", 4);
  put32(os, data_bytes);
  for (int16_t s : samples) put16(os, static_cast<uint16_t>(s));
  if (!os) throw Error(ErrorKind::kIo, "write failed: " + path.string());
}

}  // namespace sid
