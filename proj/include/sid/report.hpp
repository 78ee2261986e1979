// include/sid/report.hpp

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

#include <string>
#include <string_view>
#include <vector>

#include "sid/metrics.hpp"

namespace sid {

enum class TableFormat { kCsv, kAlignedText, kMarkdown };
TableFormat parse_table_format(std::string_view s);

struct ReportRow {
  std::string system;
  GroupedBlocks blocks;
};

// Columns: IRL/FIR/APT for EN, ZH, NoiseSilence, then the pooled (micro)
// and macro averages. Cells are fixed to 3 decimals; a missing IRL or a
// group without outcomes renders as "-". CSV output additionally carries
// every value at full precision in *_exact columns. Footnotes are appended
// to text and Markdown output only. Throws Error(kPrecondition) when no row
// covers any group.
std::string render_table(const std::vector<ReportRow>& rows, TableFormat format,
                         const std::vector<std::string>& footnotes = {});

// False-alarm number (FP count) and APT for Silence and Noise outcomes.
struct FanCell {
  std::size_t fan = 0;
  double apt_s = 0.0;
};
struct FanRow {
  std::string system;
  FanCell silence;
  FanCell noise;
};
FanRow fan_row(const std::string& system, const std::vector<Outcome>& outcomes);
std::string render_fan_table(const std::vector<FanRow>& rows, TableFormat format);

// bin_lo,bin_hi,count over [k*width, (k+1)*width) up to the largest penalty.
std::string penalty_histogram_csv(const std::vector<Outcome>& outcomes, double bin_width_s);

// Fixed 3-decimal rendering used by every table cell.
std::string format_cell(double v);

}  // namespace sid
