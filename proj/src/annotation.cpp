// src/annotation.cpp

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

#include "sid/annotation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sid/error.hpp"

namespace sid {
namespace {

constexpr std::string_view kBreakTag = "<break>";

// Punctuation stripped from word edges besides ASCII ispunct.
constexpr std::string_view kWidePunct[] = {
    "，", "。", "！", "？", "、", "；", "：", "“", "”", "‘", "’",
    "（", "）", "《", "》", "…", "—", "「", "」", "～"};

bool parse_number(const std::string& s, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size() && std::isfinite(out);
  } catch (const std::exception&) {
    return false;
  }
}

std::vector<std::string> split_ws(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream is{std::string(text)};
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

std::vector<std::string> normalized_tokens(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& w : split_ws(text)) {
    std::string n = normalize_word(w);
    if (!n.empty()) out.push_back(std::move(n));
  }
  return out;
}

bool is_ascii(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return static_cast<unsigned char>(c) < 0x80; });
}

}  // namespace

std::vector<WordAlignment> parse_ctm(std::istream& is) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<WordAlignment>> by_utt;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    auto fields = split_ws(line);
    if (fields.empty() || fields[0].starts_with(";;")) continue;
    const std::string where = "ctm line " + std::to_string(line_no) + ": ";
    if (fields.size() != 5 && fields.size() != 6)
      throw Error(ErrorKind::kData, where + "expected 5 or 6 fields");
    double start = 0, dur = 0;
    if (!parse_number(fields[2], start) || !parse_number(fields[3], dur))
      throw Error(ErrorKind::kData, where + "malformed start/duration");
    if (start < 0) throw Error(ErrorKind::kData, where + "negative start time");
    if (dur < 0) throw Error(ErrorKind::kData, where + "negative duration");
    if (dur == 0) throw Error(ErrorKind::kData, where + "zero duration");
    WordAlignment w{fields[4], start, start + dur, fields[1], fields[0]};
    auto [it, inserted] = by_utt.try_emplace(w.utterance_id);
    if (inserted) order.push_back(w.utterance_id);
    it->second.push_back(std::move(w));
  }

  std::vector<WordAlignment> out;
  for (const auto& utt : order) {
    auto& rows = by_utt[utt];
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.start_s < b.start_s; });
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (rows[i].start_s < rows[i - 1].end_s)
        throw Error(ErrorKind::kData,
                    "overlapping words in utterance " + utt + ": '" +
                        rows[i - 1].word + "' and '" + rows[i].word + "'");
    out.insert(out.end(), rows.begin(), rows.end());
  }
  return out;
}

std::vector<WordAlignment> parse_ctm(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  try {
    return parse_ctm(is);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

std::map<std::string, std::vector<WordAlignment>> group_by_utterance(
    const std::vector<WordAlignment>& rows) {
  std::map<std::string, std::vector<WordAlignment>> out;
  for (const auto& r : rows) out[r.utterance_id].push_back(r);
  return out;
}

std::string normalize_word(std::string_view word) {
  std::string s(word);
  bool changed = true;
  while (changed && !s.empty()) {
    changed = false;
    if (std::ispunct(static_cast<unsigned char>(s.front()))) {
      s.erase(0, 1);
      changed = true;
      continue;
    }
    if (std::ispunct(static_cast<unsigned char>(s.back()))) {
      s.pop_back();
      changed = true;
      continue;
    }
    for (auto p : kWidePunct) {
      if (s.starts_with(p)) {
        s.erase(0, p.size());
        changed = true;
      } else if (s.ends_with(p)) {
        s.erase(s.size() - p.size());
        changed = true;
      }
    }
  }
  for (char& c : s)
    if (static_cast<unsigned char>(c) < 0x80) c = static_cast<char>(std::tolower(c));
  return s;
}

std::vector<std::string> utf8_chars(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto lead = static_cast<unsigned char>(s[i]);
    std::size_t len = lead < 0x80 ? 1 : (lead >> 5) == 0x6 ? 2 : (lead >> 4) == 0xe ? 3 : (lead >> 3) == 0x1e ? 4 : 1;
    len = std::min(len, s.size() - i);
    out.emplace_back(s.substr(i, len));
    i += len;
  }
  return out;
}

TaggedTranscript locate_break(std::string_view raw) {
  const auto first = raw.find(kBreakTag);
  TaggedTranscript t;
  if (first == std::string_view::npos) {
    t.tokens = normalized_tokens(raw);
    return t;
  }
  if (raw.find(kBreakTag, first + kBreakTag.size()) != std::string_view::npos)
    throw Error(ErrorKind::kData, "more than one <break> tag");
  auto before = normalized_tokens(raw.substr(0, first));
  auto after = normalized_tokens(raw.substr(first + kBreakTag.size()));
  if (after.empty()) throw Error(ErrorKind::kData, "tag has no following word");
  t.break_index = before.size();
  t.tokens = std::move(before);
  t.tokens.insert(t.tokens.end(), after.begin(), after.end());
  return t;
}

Alignment align_tokens(std::span<const std::string> a,
                       std::span<const std::string> b) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<int> d((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> int& { return d[i * (m + 1) + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = static_cast<int>(i);
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= m; ++j)
      at(i, j) = std::min({at(i - 1, j - 1) + (a[i - 1] == b[j - 1] ? 0 : 1),
                           at(i - 1, j) + 1, at(i, j - 1) + 1});

  Alignment out;
  out.cost = at(n, m);
  out.mapping.assign(n, std::nullopt);
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 &&
        at(i, j) == at(i - 1, j - 1) + (a[i - 1] == b[j - 1] ? 0 : 1)) {
      out.mapping[i - 1] = j - 1;
      --i;
      --j;
    } else if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      --i;
    } else {
      --j;
    }
  }
  return out;
}

FusionResult fuse(const TaggedTranscript& transcript,
                  const std::vector<WordAlignment>& alignments,
                  const FuseOptions& options) {
  if (!transcript.break_index)
    throw Error(ErrorKind::kPrecondition, "transcript has no <break> tag");
  if (alignments.empty())
    throw Error(ErrorKind::kPrecondition, "no word alignments");
  for (const auto& w : alignments)
    if (w.utterance_id != alignments.front().utterance_id)
      throw Error(ErrorKind::kPrecondition, "alignments span several utterances");

  std::vector<std::string> ctm_words;
  ctm_words.reserve(alignments.size());
  for (const auto& w : alignments) ctm_words.push_back(normalize_word(w.word));

  std::vector<std::string> tokens = transcript.tokens;
  std::size_t break_index = *transcript.break_index;

  const bool char_level_ctm =
      std::all_of(ctm_words.begin(), ctm_words.end(),
                  [](const std::string& w) { return utf8_chars(w).size() == 1; }) &&
      std::any_of(ctm_words.begin(), ctm_words.end(),
                  [](const std::string& w) { return !is_ascii(w); });
  if (char_level_ctm) {
    std::vector<std::string> chars;
    std::size_t new_break = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (i == break_index) new_break = chars.size();
      for (auto& c : utf8_chars(tokens[i])) chars.push_back(std::move(c));
    }
    tokens = std::move(chars);
    break_index = new_break;
  }

  const Alignment al = align_tokens(tokens, ctm_words);
  const auto ceiling = static_cast<int>(
      std::ceil(options.max_cost_ratio * static_cast<double>(tokens.size()) - 1e-9));
  if (al.cost > ceiling)
    throw Error(ErrorKind::kData, "alignment cost " + std::to_string(al.cost) +
                                      " exceeds ceiling " + std::to_string(ceiling));
  const auto matched = al.mapping[break_index];
  if (!matched)
    throw Error(ErrorKind::kData, "fusion failure: break token '" +
                                      tokens[break_index] +
                                      "' has no aligned CTM word");
  const auto& w = alignments[*matched];
  return {w.start_s, w.word, al.cost};
}

double apply_intent_delay(double break_time_s,
                          const std::vector<WordAlignment>& alignments) {
  constexpr double kTolerance = 1e-3;
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < alignments.size(); ++i) {
    const double dist = std::abs(alignments[i].start_s - break_time_s);
    if (dist <= kTolerance &&
        (!best || dist < std::abs(alignments[*best].start_s - break_time_s)))
      best = i;
  }
  if (!best)
    throw Error(ErrorKind::kData, "break time " + std::to_string(break_time_s) +
                                      " matches no word start");
  if (*best + 1 < alignments.size()) return alignments[*best + 1].start_s;
  return alignments[*best].end_s;
}

}  // namespace sid
