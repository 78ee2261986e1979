// src/report.cpp

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

#include "sid/report.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include <fmt/format.h>

#include "sid/error.hpp"

namespace sid {
namespace {

constexpr Group kGroups[] = {Group::kEN, Group::kZH, Group::kNoiseSilence};
constexpr std::string_view kMetrics[] = {"IRL", "FIR", "APT"};

struct Column {
  std::string block;   // "EN", ..., "Average", "Macro"
  std::string metric;  // IRL | FIR | APT
};

std::vector<Column> columns() {
  std::vector<Column> cols;
  for (Group g : kGroups)
    for (auto m : kMetrics) cols.push_back({std::string(to_string(g)), std::string(m)});
  for (auto block : {"Average", "Macro"})
    for (auto m : kMetrics) cols.push_back({block, std::string(m)});
  return cols;
}

const MetricBlock* pick(const GroupedBlocks& b, const std::string& block) {
  if (block == "Average") return &b.pooled;
  if (block == "Macro") return &b.macro;
  for (Group g : kGroups)
    if (to_string(g) == block) {
      auto it = b.groups.find(g);
      return it == b.groups.end() ? nullptr : &it->second;
    }
  return nullptr;
}

std::optional<double> value(const MetricBlock* m, const std::string& metric) {
  if (!m) return std::nullopt;
  if (metric == "IRL") return m->irl_s;
  if (metric == "FIR") return m->fir;
  return m->apt_s;
}

std::string aligned(const std::vector<std::vector<std::string>>& cells) {
  std::vector<std::size_t> width;
  for (const auto& row : cells) {
    width.resize(std::max(width.size(), row.size()), 0);
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::string out;
  for (const auto& row : cells) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) line += "  ";
      if (c == 0)
        line += fmt::format("{:<{}}", row[c], width[c]);
      else
        line += fmt::format("{:>{}}", row[c], width[c]);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  return out;
}

std::string markdown(const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& body) {
  auto row = [](const std::vector<std::string>& cells) {
    std::string s = "|";
    for (const auto& c : cells) s += " " + c + " |";
    return s + "\n";
  };
  std::string out = row(header);
  out += "|";
  for (std::size_t i = 0; i < header.size(); ++i) out += i == 0 ? " --- |" : " ---: |";
  out += "\n";
  for (const auto& b : body) out += row(b);
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

}  // namespace

TableFormat parse_table_format(std::string_view s) {
  if (s == "csv") return TableFormat::kCsv;
  if (s == "text") return TableFormat::kAlignedText;
  if (s == "markdown" || s == "md") return TableFormat::kMarkdown;
  throw Error(ErrorKind::kConfig, "unknown table format '" + std::string(s) + "'");
}

std::string format_cell(double v) {
  // Avoid "-0.000" for tiny negative rounding noise.
  if (std::abs(v) < 0.0005) v = 0.0;
  return fmt::format("{:.3f}", v);
}

std::string render_table(const std::vector<ReportRow>& rows, TableFormat format,
                         const std::vector<std::string>& footnotes) {
  const bool any = std::any_of(rows.begin(), rows.end(),
                               [](const ReportRow& r) { return !r.blocks.groups.empty(); });
  if (!any) throw Error(ErrorKind::kPrecondition, "report needs at least one group");

  const auto cols = columns();
  std::vector<std::vector<std::string>> body;
  std::vector<std::vector<std::string>> exact;
  for (const auto& r : rows) {
    std::vector<std::string> line{r.system}, full;
    for (const auto& c : cols) {
      const auto v = value(pick(r.blocks, c.block), c.metric);
      line.push_back(v ? format_cell(*v) : "-");
      full.push_back(v ? fmt::format("{:.17g}", *v) : "");
    }
    body.push_back(std::move(line));
    exact.push_back(std::move(full));
  }

  switch (format) {
    case TableFormat::kCsv: {
      std::string out = "system";
      for (const auto& c : cols) out += "," + c.block + "_" + c.metric;
      for (const auto& c : cols) out += "," + c.block + "_" + c.metric + "_exact";
      out += "\n";
      for (std::size_t i = 0; i < body.size(); ++i) {
        out += csv_field(body[i][0]);
        for (std::size_t c = 1; c < body[i].size(); ++c) out += "," + body[i][c];
        for (const auto& e : exact[i]) out += "," + e;
        out += "\n";
      }
      return out;
    }
    case TableFormat::kAlignedText: {
      std::vector<std::vector<std::string>> cells;
      std::vector<std::string> top{""}, sub{"System"};
      for (std::size_t i = 0; i < cols.size(); ++i) {
        top.push_back(i % 3 == 0 ? cols[i].block : "");
        sub.push_back(cols[i].metric);
      }
      cells.push_back(top);
      cells.push_back(sub);
      cells.insert(cells.end(), body.begin(), body.end());
      std::string out = aligned(cells);
      for (const auto& f : footnotes) out += "  * " + f + "\n";
      return out;
    }
    case TableFormat::kMarkdown: {
      std::vector<std::string> header{"System"};
      for (const auto& c : cols) header.push_back(c.block + " " + c.metric);
      std::string out = markdown(header, body);
      if (!footnotes.empty()) out += "\n";
      for (const auto& f : footnotes) out += "- " + f + "\n";
      return out;
    }
  }
  return {};
}

FanRow fan_row(const std::string& system, const std::vector<Outcome>& outcomes) {
  FanRow row{system, {}, {}};
  std::size_t n_sil = 0, n_noise = 0;
  double p_sil = 0.0, p_noise = 0.0;
  for (const auto& o : outcomes) {
    if (o.category == Category::kSilence) {
      ++n_sil;
      p_sil += o.penalty_s;
      if (o.kind == OutcomeKind::kFP) ++row.silence.fan;
    } else if (o.category == Category::kNoise) {
      ++n_noise;
      p_noise += o.penalty_s;
      if (o.kind == OutcomeKind::kFP) ++row.noise.fan;
    }
  }
  if (n_sil) row.silence.apt_s = p_sil / static_cast<double>(n_sil);
  if (n_noise) row.noise.apt_s = p_noise / static_cast<double>(n_noise);
  return row;
}

std::string render_fan_table(const std::vector<FanRow>& rows, TableFormat format) {
  std::vector<std::vector<std::string>> body;
  for (const auto& r : rows)
    body.push_back({r.system, std::to_string(r.silence.fan), format_cell(r.silence.apt_s),
                    std::to_string(r.noise.fan), format_cell(r.noise.apt_s)});
  switch (format) {
    case TableFormat::kCsv: {
      std::string out = "system,Silence_FAN,Silence_APT,Noise_FAN,Noise_APT\n";
      for (const auto& b : body)
        out += fmt::format("{},{},{},{},{}\n", csv_field(b[0]), b[1], b[2], b[3], b[4]);
      return out;
    }
    case TableFormat::kAlignedText: {
      std::vector<std::vector<std::string>> cells{{"", "Silence", "", "Noise", ""},
                                                  {"System", "FAN", "APT", "FAN", "APT"}};
      cells.insert(cells.end(), body.begin(), body.end());
      return aligned(cells);
    }
    case TableFormat::kMarkdown:
      return markdown({"System", "Silence FAN", "Silence APT", "Noise FAN", "Noise APT"}, body);
  }
  return {};
}

std::string penalty_histogram_csv(const std::vector<Outcome>& outcomes, double bin_width_s) {
  if (!(bin_width_s > 0.0)) throw Error(ErrorKind::kConfig, "bin width must be positive");
  std::vector<std::size_t> bins;
  for (const auto& o : outcomes) {
    const auto k = static_cast<std::size_t>(std::floor(o.penalty_s / bin_width_s));
    if (k >= bins.size()) bins.resize(k + 1, 0);
    ++bins[k];
  }
  std::string out = "bin_lo,bin_hi,count\n";
  for (std::size_t k = 0; k < bins.size(); ++k)
    out += fmt::format("{:.3f},{:.3f},{}\n", k * bin_width_s, (k + 1) * bin_width_s, bins[k]);
  return out;
}

}  // namespace sid
