// include/sid/annotation.hpp

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

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sid {

// One CTM row.
struct WordAlignment {
  std::string word;
  double start_s = 0.0;
  double end_s = 0.0;
  std::string channel;
  std::string utterance_id;
};

struct TaggedTranscript {
  std::vector<std::string> tokens;
  std::optional<std::size_t> break_index;
};

struct FusionResult {
  double break_time_s = 0.0;
  std::string matched_word;
  int alignment_cost = 0;
};

// Rows are `utt channel start duration word [confidence]`; lines starting
// with ";;" are comments. Output is grouped by utterance (first-seen
// order) and sorted by start within each utterance.
std::vector<WordAlignment> parse_ctm(std::istream& is);
std::vector<WordAlignment> parse_ctm(const std::filesystem::path& path);

// Splits a parsed CTM by utterance id.
std::map<std::string, std::vector<WordAlignment>> group_by_utterance(
    const std::vector<WordAlignment>& rows);

// Case-folds ASCII and strips leading/trailing punctuation (ASCII and common
// CJK marks). Intra-word hyphens and apostrophes survive. May return "".
std::string normalize_word(std::string_view word);

// Splits a UTF-8 string into code points.
std::vector<std::string> utf8_chars(std::string_view s);

TaggedTranscript locate_break(std::string_view raw_tagged_text);

// Minimum edit-distance alignment (match 0, substitution 1, indel 1).
// `mapping[i]` is the index in `b` aligned to a[i], or nullopt for a
// deletion.
struct Alignment {
  int cost = 0;
  std::vector<std::optional<std::size_t>> mapping;
};
Alignment align_tokens(std::span<const std::string> a,
                       std::span<const std::string> b);

struct FuseOptions {
  // Reject when cost > ceil(max_cost_ratio * token count).
  double max_cost_ratio = 0.30;
};

// `alignments` must hold a single utterance. Character-level CTMs (every
// word a single code point) trigger per-character tokenization of the
// transcript.
FusionResult fuse(const TaggedTranscript& transcript,
                  const std::vector<WordAlignment>& alignments,
                  const FuseOptions& options = {});

// Start of the word following the break word, or the break word's end when
// it is the last one. The break must sit within 1 ms of some word start.
double apply_intent_delay(double break_time_s,
                          const std::vector<WordAlignment>& alignments);

}  // namespace sid
