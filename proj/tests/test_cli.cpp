// tests/test_cli.cpp

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

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sid/wav.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using sid::test::ManifestLine;
using sid::test::TempDir;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run harness(const std::string& args) {
  const std::string cmd = "SID_HARNESS_LOG=error " + std::string(SID_HARNESS_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = ::popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = ::pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string line;
  while (std::getline(is, line)) out.push_back(line);
  return out;
}

// CSV cell lookup by header name on the first data row.
std::string csv_cell(const std::string& csv, const std::string& column) {
  const auto rows = lines_of(csv);
  REQUIRE(rows.size() >= 2);
  std::vector<std::string> head, row;
  std::string c;
  for (std::istringstream h(rows[0]); std::getline(h, c, ',');) head.push_back(c);
  for (std::istringstream r(rows[1]); std::getline(r, c, ',');) row.push_back(c);
  for (std::size_t i = 0; i < head.size() && i < row.size(); ++i)
    if (head[i] == column) return row[i];
  FAIL("no column " << column);
  return {};
}

// A small mixed corpus: speech-like tones with breaks, backchannels,
// digital silence and faint noise.
struct Corpus {
  TempDir dir;
  fs::path manifest;
  Corpus() {
    auto tone = [](double sil, double on) {
      auto pcm = sid::test::zeros(sil);
      const auto t = sid::test::sine(on, 300.0, 6000.0);
      pcm.insert(pcm.end(), t.begin(), t.end());
      return pcm;
    };
    sid::write_wav(dir / "int.wav", 16000, tone(1.0, 2.0));
    sid::write_wav(dir / "bc.wav", 16000, tone(0.5, 0.4));
    sid::write_wav(dir / "sil.wav", 16000, sid::test::zeros(2.0));
    sid::write_wav(dir / "noise.wav", 16000, sid::test::noise(2.0, 10.0, 4));
    std::vector<ManifestLine> lines;
    for (int i = 0; i < 3; ++i) {
      lines.push_back({"en_int" + std::to_string(i), "int.wav", "EN", "InterruptMiddle", 1.0 + 0.1 * i, 3.0});
      lines.push_back({"zh_int" + std::to_string(i), "int.wav", "ZH", "InterruptBeginning", 1.05, std::nullopt});
      lines.push_back({"en_bc" + std::to_string(i), "bc.wav", "EN", "Uninterrupted", std::nullopt, std::nullopt});
      lines.push_back({"sil" + std::to_string(i), "sil.wav", "NONE", "Silence", std::nullopt, std::nullopt});
      lines.push_back({"noise" + std::to_string(i), "noise.wav", "NONE", "Noise", std::nullopt, std::nullopt});
    }
    manifest = dir / "m.jsonl";
    sid::test::write_manifest(manifest, lines);
  }
};

}  // namespace

TEST_CASE("evaluate with the oracle detector") {
  Corpus c;
  const auto out = c.dir / "oracle";
  const auto r = harness("evaluate --manifest " + c.manifest.string() + " --detector oracle --chunk-ms 100 --k 3 -o " + out.string());
  REQUIRE(r.code == 0);
  for (const char* f : {"traces.jsonl", "errors.jsonl", "outcomes.jsonl", "report.csv", "report.txt",
                        "report.md", "fan.csv", "fan.txt", "penalty_hist.csv", "summary.json"})
    CHECK(fs::exists(out / f));
  const auto csv = slurp(out / "report.csv");
  CHECK(csv_cell(csv, "Average_FIR") == "0.000");
  CHECK(csv_cell(csv, "EN_IRL") == "0.300");
  CHECK(slurp(out / "errors.jsonl").empty());
  const auto summary = nlohmann::json::parse(slurp(out / "summary.json"));
  CHECK(summary["instances"] == 15);
  CHECK(summary["errored"] == 0);
  CHECK(r.out.find("Average") != std::string::npos);
}

TEST_CASE("evaluate output is independent of parallelism and reruns") {
  Corpus c;
  const std::string base = "evaluate --manifest " + c.manifest.string() + " --detector energy -o ";
  REQUIRE(harness(base + (c.dir / "j1").string() + " -j 1").code == 0);
  REQUIRE(harness(base + (c.dir / "j4").string() + " -j 4").code == 0);
  REQUIRE(harness(base + (c.dir / "j4b").string() + " -j 4").code == 0);
  for (const char* f : {"traces.jsonl", "outcomes.jsonl", "report.csv", "report.txt", "fan.csv"}) {
    CHECK(slurp(c.dir / "j1" / f) == slurp(c.dir / "j4" / f));
    CHECK(slurp(c.dir / "j4" / f) == slurp(c.dir / "j4b" / f));
  }
}

TEST_CASE("energy detector stays quiet on digital silence") {
  Corpus c;
  const auto out = c.dir / "e";
  REQUIRE(harness("evaluate --manifest " + c.manifest.string() + " --detector energy --threshold-dbfs -40 -o " + out.string()).code == 0);
  CHECK(csv_cell(slurp(out / "fan.csv"), "Silence_FAN") == "0");
  CHECK(csv_cell(slurp(out / "fan.csv"), "Noise_FAN") == "0");
  // Backchannel tones do trip a plain VAD.
  CHECK(csv_cell(slurp(out / "report.csv"), "EN_FIR") != "0.000");
}

TEST_CASE("external detectors through the CLI") {
  Corpus c;
  SUBCASE("no listener exits with the protocol code") {
    const auto r = harness("evaluate --manifest " + c.manifest.string() +
                           " --detector external:tcp:127.0.0.1:1 --timeout-ms 300 -o " + (c.dir / "x").string());
    CHECK(r.code == 4);
  }
  SUBCASE("mock energy peer matches the built-in detector") {
    REQUIRE(harness("evaluate --manifest " + c.manifest.string() + " --detector energy -o " + (c.dir / "b").string()).code == 0);
    const std::string spec = "'external:subprocess:" + std::string(MOCK_PEER_PATH) + " energy'";
    REQUIRE(harness("evaluate --manifest " + c.manifest.string() + " --detector " + spec + " -j 2 -o " + (c.dir / "p").string()).code == 0);
    CHECK(slurp(c.dir / "b" / "outcomes.jsonl") == slurp(c.dir / "p" / "outcomes.jsonl"));
    CHECK(slurp(c.dir / "b" / "traces.jsonl") == slurp(c.dir / "p" / "traces.jsonl"));
  }
  SUBCASE("a crashing peer yields a partial run") {
    const std::string spec = "'external:subprocess:" + std::string(MOCK_PEER_PATH) + " crash sil1'";
    const auto r = harness("evaluate --manifest " + c.manifest.string() + " --detector " + spec + " -o " + (c.dir / "c").string());
    CHECK(r.code == 5);
    const auto errs = lines_of(slurp(c.dir / "c" / "errors.jsonl"));
    REQUIRE(errs.size() == 1);
    CHECK(nlohmann::json::parse(errs[0])["id"] == "sil1");
    CHECK(lines_of(slurp(c.dir / "c" / "outcomes.jsonl")).size() == 14);
  }
}

TEST_CASE("score precomputed stop logs") {
  Corpus c;
  {
    std::ofstream log(c.dir / "stops.jsonl");
    log << R"({"id":"en_int0","stop_time_s":1.5})" << "\n"
        << R"({"id":"en_bc0","stop_time_s":0.2})" << "\n"
        << R"({"id":"sil0","stop_time_s":"none"})" << "\n";
  }
  const auto out = c.dir / "s";
  const auto r = harness("score --manifest " + c.manifest.string() + " --stop-log " + (c.dir / "stops.jsonl").string() +
                         " --name ext -o " + out.string());
  REQUIRE(r.code == 0);
  const auto outcomes = lines_of(slurp(out / "outcomes.jsonl"));
  REQUIRE(outcomes.size() == 15);
  const auto first = nlohmann::json::parse(outcomes[0]);
  CHECK(first["kind"] == "TP");
  CHECK(first["penalty_s"].get<double>() == doctest::Approx(0.5));

  std::ofstream(c.dir / "bad.jsonl") << R"({"id":"ghost","stop_time_s":1.0})" << "\n";
  CHECK(harness("score --manifest " + c.manifest.string() + " --stop-log " + (c.dir / "bad.jsonl").string() + " -o " + out.string()).code == 3);
  CHECK(harness("score --manifest " + c.manifest.string() + " --stop-log " + (c.dir / "stops.jsonl").string() +
                " --fp-penalty-mode sometimes -o " + out.string()).code == 2);
  CHECK(harness("score --manifest " + c.manifest.string()).code == 2);

  SUBCASE("report combines several systems") {
    REQUIRE(harness("evaluate --manifest " + c.manifest.string() + " --detector never -o " + (c.dir / "n").string()).code == 0);
    const auto rep = harness("report --format csv --outcomes ext=" + (out / "outcomes.jsonl").string() +
                             " --outcomes silent=" + (c.dir / "n" / "outcomes.jsonl").string());
    REQUIRE(rep.code == 0);
    const auto rows = lines_of(rep.out);
    REQUIRE(rows.size() == 3);
    CHECK(rows[1].rfind("ext,", 0) == 0);
    CHECK(rows[2].rfind("silent,", 0) == 0);
    const auto fan = harness("report --fan --format csv --outcomes silent=" + (c.dir / "n" / "outcomes.jsonl").string());
    CHECK(lines_of(fan.out)[1] == "silent,0,0.000,0,0.000");
  }
}

TEST_CASE("fuse, cropgen and validate") {
  Corpus c;
  {
    std::ofstream ctm(c.dir / "a.ctm");
    ctm << "en_int0 A 0.00 0.40 hello\n"
           "en_int0 A 0.45 0.30 there\n"
           "en_int0 A 1.00 0.30 wait\n"
           "en_int0 A 1.35 0.40 stop\n";
    std::ofstream(c.dir / "t.txt") << "hello there <break> wait stop";
  }
  const auto fu = harness("fuse --ctm " + (c.dir / "a.ctm").string() + " --tagged " + (c.dir / "t.txt").string());
  REQUIRE(fu.code == 0);
  const auto rec = nlohmann::json::parse(fu.out);
  CHECK(rec["id"] == "en_int0");
  CHECK(rec["break_time_s"].get<double>() == 1.0);
  CHECK(rec["matched_word"] == "wait");
  CHECK(rec["alignment_cost"] == 0);

  // Every interrupt instance needs alignments unless the delay is off.
  CHECK(harness("cropgen --manifest " + c.manifest.string() + " --ctm " + (c.dir / "a.ctm").string() +
                " -o " + (c.dir / "clips").string()).code == 3);
  const auto cg = harness("cropgen --manifest " + c.manifest.string() + " --no-intent-delay --n 4 --seed 42 --emit-audio -o " +
                          (c.dir / "clips").string());
  REQUIRE(cg.code == 0);
  const auto clips = lines_of(slurp(c.dir / "clips" / "clips.jsonl"));
  CHECK(clips.size() == 60);
  for (const auto& l : clips) {
    const auto j = nlohmann::json::parse(l);
    CHECK(fs::exists(c.dir / "clips" / j["audio_path"].get<std::string>()));
  }
  const auto again = harness("cropgen --manifest " + c.manifest.string() + " --no-intent-delay --n 4 --seed 42 -o " +
                             (c.dir / "clips2").string());
  REQUIRE(again.code == 0);
  const auto clips2 = lines_of(slurp(c.dir / "clips2" / "clips.jsonl"));
  REQUIRE(clips2.size() == clips.size());
  for (std::size_t i = 0; i < clips.size(); ++i) {
    auto a = nlohmann::json::parse(clips[i]), b = nlohmann::json::parse(clips2[i]);
    a.erase("audio_path");
    CHECK(a == b);
  }

  const auto va = harness("validate --manifest " + c.manifest.string());
  CHECK(va.code == 0);
  CHECK(nlohmann::json::parse(va.out)["total"] == 15);
  std::ofstream(c.dir / "expect.json") << R"({"counts":{"EN":{"InterruptMiddle":3,"Uninterrupted":3},"ZH":{"InterruptBeginning":3},"NONE":{"Silence":3,"Noise":2}}})";
  const auto bad = harness("validate --manifest " + c.manifest.string() + " --expect " + (c.dir / "expect.json").string());
  CHECK(bad.code == 3);
  CHECK(bad.out.find("mismatch (NONE, Noise): expected 2, actual 3") != std::string::npos);
}

TEST_CASE("config file and usage errors") {
  Corpus c;
  std::ofstream(c.dir / "run.ini") << "[evaluate]\nmanifest = " << c.manifest.string() << "\ndetector = always\nk = 2\n";
  const auto out = c.dir / "cfg";
  REQUIRE(harness("--config " + (c.dir / "run.ini").string() + " evaluate -o " + out.string()).code == 0);
  CHECK(csv_cell(slurp(out / "report.csv"), "NoiseSilence_FIR") == "1.000");
  CHECK(harness("").code == 2);
  CHECK(harness("evaluate --manifest " + c.manifest.string() + " --detector psychic").code == 2);
  CHECK(harness("evaluate --manifest " + (c.dir / "missing.jsonl").string() + " --detector oracle -o " + out.string()).code == 3);
  CHECK(harness("evaluate --manifest " + c.manifest.string() + " --detector oracle --chunk-ms 3 -o " + out.string()).code == 2);
}
