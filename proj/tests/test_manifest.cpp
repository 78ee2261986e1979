// tests/test_manifest.cpp

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

#include <doctest.h>

#include <fstream>

#include "sid/error.hpp"
#include "sid/manifest.hpp"
#include "support.hpp"

using namespace sid;
using sid::test::TempDir;
using sid::test::write_manifest;

namespace {

void write_audio(const TempDir& dir, const std::string& name, double seconds) {
  const auto pcm = sid::test::zeros(seconds);
  write_wav(dir / name, 16000, pcm);
}

std::string error_of(const std::filesystem::path& p) {
  try {
    load_manifest(p);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("wav round trip is sample exact") {
  TempDir dir;
  const auto pcm = sid::test::sine(0.37, 300.0, 12000.0);
  write_wav(dir / "a.wav", 16000, pcm);
  const auto info = probe_wav(dir / "a.wav");
  CHECK(info.sample_rate_hz == 16000);
  CHECK(info.num_samples == pcm.size());
  const auto audio = read_wav(dir / "a.wav");
  CHECK(audio.samples == pcm);
  CHECK(audio.duration_s() == doctest::Approx(0.37).epsilon(1e-12));
}

TEST_CASE("wav reader rejects stereo and non-PCM files") {
  TempDir dir;
  // 44-byte header, stereo
  std::ofstream os(dir / "st.wav", std::ios::binary);
  const unsigned char hdr[44] = {'R', 'I', 'F', 'F', 36, 0, 0, 0, 'W', 'A', 'V', 'E',
                                 'f', 'm', 't', ' ', 16, 0, 0, 0, 1, 0, 2, 0,
                                 0x80, 0x3e, 0, 0, 0, 0xfa, 0, 0, 4, 0, 16, 0,
                                 'd', 'a', 't', 'a', 0, 0, 0, 0};
  os.write(reinterpret_cast<const char*>(hdr), sizeof hdr);
  os.close();
  CHECK_THROWS_AS(probe_wav(dir / "st.wav"), Error);
}

TEST_CASE("turn duration defaults to clip duration") {
  TempDir dir;
  write_audio(dir, "zh.wav", 6.0);
  write_manifest(dir / "m.jsonl", {{"zh_0001", "zh.wav", "ZH", "Uninterrupted", {}, {}}});
  const auto insts = load_manifest(dir / "m.jsonl");
  REQUIRE(insts.size() == 1);
  CHECK(insts[0].turn_duration_s == 6.0);
  CHECK(insts[0].duration_s() == 6.0);
  CHECK_FALSE(insts[0].break_time_s.has_value());
  CHECK(insts[0].audio_path == dir / "zh.wav");
}

TEST_CASE("break time on an uninterrupted instance is rejected") {
  TempDir dir;
  write_audio(dir, "a.wav", 6.0);
  write_manifest(dir / "m.jsonl", {{"x", "a.wav", "EN", "Uninterrupted", 2.0, {}}});
  CHECK(error_of(dir / "m.jsonl").find("break_time forbidden for category") != std::string::npos);
}

TEST_CASE("manifest preserves file order") {
  TempDir dir;
  write_audio(dir, "a.wav", 3.0);
  write_manifest(dir / "m.jsonl", {{"c", "a.wav", "EN", "InterruptBeginning", 0.5, 8.0},
                                   {"a", "a.wav", "ZH", "Uninterrupted", {}, {}},
                                   {"b", "a.wav", "NONE", "Noise", {}, 10.0}});
  const auto insts = load_manifest(dir / "m.jsonl");
  REQUIRE(insts.size() == 3);
  CHECK(insts[0].id == "c");
  CHECK(insts[1].id == "a");
  CHECK(insts[2].id == "b");
  CHECK(insts[0].turn_duration_s == 8.0);
}

TEST_CASE("manifest error paths") {
  TempDir dir;
  write_audio(dir, "a.wav", 3.0);

  SUBCASE("duplicate id") {
    write_manifest(dir / "m.jsonl", {{"a", "a.wav", "EN", "Uninterrupted", {}, {}},
                                     {"a", "a.wav", "EN", "Uninterrupted", {}, {}}});
    CHECK(error_of(dir / "m.jsonl").find("duplicate id") != std::string::npos);
  }
  SUBCASE("missing audio") {
    write_manifest(dir / "m.jsonl", {{"a", "nope.wav", "EN", "Uninterrupted", {}, {}}});
    CHECK(error_of(dir / "m.jsonl").find("missing audio") != std::string::npos);
  }
  SUBCASE("malformed line reports its number") {
    {
      std::ofstream os(dir / "m.jsonl");
      os << R"({"id":"a","audio_path":"a.wav","language":"EN","category":"Uninterrupted"})" << "\n";
      os << "{not json\n";
    }
    CHECK(error_of(dir / "m.jsonl").find("m.jsonl:2:") != std::string::npos);
  }
  SUBCASE("interruption without break") {
    write_manifest(dir / "m.jsonl", {{"a", "a.wav", "EN", "InterruptMiddle", {}, {}}});
    CHECK(error_of(dir / "m.jsonl").find("break_time_s required") != std::string::npos);
  }
  SUBCASE("break after end of audio") {
    write_manifest(dir / "m.jsonl", {{"a", "a.wav", "EN", "InterruptMiddle", 3.0, 10.0}});
    CHECK_FALSE(error_of(dir / "m.jsonl").empty());
  }
  SUBCASE("break after end of turn") {
    write_manifest(dir / "m.jsonl", {{"a", "a.wav", "EN", "InterruptMiddle", 2.0, 1.5}});
    CHECK(error_of(dir / "m.jsonl").find("end of the turn") != std::string::npos);
  }
  SUBCASE("noise must carry language NONE") {
    write_manifest(dir / "m.jsonl", {{"a", "a.wav", "EN", "Noise", {}, {}}});
    CHECK(error_of(dir / "m.jsonl").find("language NONE") != std::string::npos);
  }
  SUBCASE("declared sample rate must match the WAV") {
    std::ofstream os(dir / "m.jsonl");
    os << R"({"id":"a","audio_path":"a.wav","language":"EN","category":"Uninterrupted","sample_rate_hz":8000})"
       << "\n";
    os.close();
    CHECK(error_of(dir / "m.jsonl").find("does not match") != std::string::npos);
  }
}

TEST_CASE("load is deterministic and the declared header validates") {
  TempDir dir;
  write_audio(dir, "a.wav", 2.0);
  const nlohmann::json header = {
      {"counts", {{"EN", {{"Uninterrupted", 2}}}, {"NONE", {{"Silence", 1}}}}}};
  write_manifest(dir / "m.jsonl",
                 {{"a", "a.wav", "EN", "Uninterrupted", {}, {}},
                  {"b", "a.wav", "EN", "Uninterrupted", {}, {}},
                  {"c", "a.wav", "NONE", "Silence", {}, {}}},
                 std::optional<nlohmann::json>(header));
  const auto f1 = load_manifest_file(dir / "m.jsonl");
  const auto f2 = load_manifest_file(dir / "m.jsonl");
  REQUIRE(f1.declared.has_value());
  REQUIRE(f1.instances.size() == f2.instances.size());
  for (std::size_t i = 0; i < f1.instances.size(); ++i)
    CHECK(instance_to_json(f1.instances[i]) == instance_to_json(f2.instances[i]));
  CHECK(validate_composition(summarize(f1.instances), *f1.declared).empty());
  CHECK(summarize(f1.instances).total_audio_s == doctest::Approx(6.0));
}

TEST_CASE("summarize buckets by language and category") {
  using sid::test::make_instance;
  CHECK(summarize({}).total == 0);
  CHECK(summarize({}).counts.empty());

  std::vector<EvalInstance> two{make_instance("a", 1.0, std::nullopt),
                                make_instance("b", 1.0, std::nullopt)};
  const auto s = summarize(two);
  CHECK(s.total == 2);
  CHECK(s.counts.at({Language::kEN, Category::kUninterrupted}) == 2);
}

TEST_CASE("validate_composition reports each mismatched bucket") {
  CorpusSummary expected;
  expected.counts[{Language::kNone, Category::kNoise}] = 200;
  expected.total = 200;
  CHECK(validate_composition(expected, expected).empty());

  CorpusSummary actual;
  actual.counts[{Language::kNone, Category::kNoise}] = 199;
  actual.total = 199;
  const auto d = validate_composition(actual, expected);
  REQUIRE(d.size() == 1);
  CHECK(d[0] == Discrepancy{{Language::kNone, Category::kNoise}, 200, 199});
}

TEST_CASE("composition json round trip and total check") {
  const auto composition = load_composition(std::filesystem::path(SID_SOURCE_DIR) / "data/benchmark_composition.json");
  CHECK(composition.total == 3700);
  CHECK(composition_from_json(composition_to_json(composition)).counts == composition.counts);
  CHECK_THROWS_AS(composition_from_json(nlohmann::json::parse(
                      R"({"counts":{"EN":{"Uninterrupted":3}},"total":4})")),
                  Error);
}
