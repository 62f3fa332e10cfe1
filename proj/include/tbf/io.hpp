// Copyright 2026 The TBF Authors
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

#include <array>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "tbf/belief.hpp"
#include "tbf/eval.hpp"
#include "tbf/temporal_filter.hpp"

/**
 * \file
 * \brief File formats: comma-separated CSV with a header row and `.` decimal
 * point, JSON documents and JSON-lines event logs.
 *
 * Doubles are written in shortest round-trip form, so re-reading an emitted
 * CSV yields bit-identical values.
 */

namespace tbf::io {

using json = nlohmann::json;

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

struct CsvTable {
  std::string source;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based, per row

  [[nodiscard]] std::optional<std::size_t> column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    return std::nullopt;
  }

  [[nodiscard]] std::size_t require_column(std::string_view name) const {
    auto c = column(name);
    if (!c) throw Error(ErrorCode::ParseError, source + ": missing column '" + std::string(name) + "'");
    return *c;
  }

  [[nodiscard]] double number(std::size_t row, std::size_t col) const {
    const std::string& cell = rows[row][col];
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    while (first < last && *first == ' ') ++first;
    while (last > first && last[-1] == ' ') --last;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last || first == last) {
      throw Error(ErrorCode::ParseError, source + ":" + std::to_string(line_numbers[row]) +
                                             ": column '" + header[col] + "': '" + cell +
                                             "' is not a number");
    }
    return v;
  }

  [[nodiscard]] std::size_t index(std::size_t row, std::size_t col) const {
    const double v = number(row, col);
    if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
      throw Error(ErrorCode::ParseError, source + ":" + std::to_string(line_numbers[row]) +
                                             ": column '" + header[col] + "' needs a whole number");
    }
    return static_cast<std::size_t>(v);
  }
};

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    out.emplace_back(line.substr(pos, comma == std::string_view::npos ? line.npos : comma - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

inline CsvTable read_csv(std::istream& in, std::string source) {
  CsvTable t;
  t.source = std::move(source);
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (!have_header) {
      t.header = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw Error(ErrorCode::RaggedRows, t.source + ":" + std::to_string(line_no) + ": expected " +
                                             std::to_string(t.header.size()) + " cells, got " +
                                             std::to_string(cells.size()));
    }
    t.rows.push_back(std::move(cells));
    t.line_numbers.push_back(line_no);
  }
  if (!have_header) throw Error(ErrorCode::ParseError, t.source + ": empty file");
  return t;
}

inline std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for reading");
  return in;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
  return out;
}

inline CsvTable read_csv_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_csv(in, path.string());
}

inline json read_json_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Mass distributions

inline constexpr std::string_view kMassColumns = "m_empty,m_R,m_F,m_omega";

/// `m_empty,m_R,m_F,m_omega` for a binary mass.
inline std::string mass_row(const MassDistribution& m) {
  return format_double(m[binary::kEmpty]) + "," + format_double(m[binary::kTrue]) + "," +
         format_double(m[binary::kFalse]) + "," + format_double(m[binary::kOmega]);
}

inline MassDistribution parse_mass_row(const CsvTable& t, std::size_t row,
                                       std::span<const std::size_t, 4> cols) {
  try {
    return make_binary(t.number(row, cols[0]), t.number(row, cols[1]), t.number(row, cols[2]),
                       t.number(row, cols[3]));
  } catch (const Error& e) {
    if (e.is_io()) throw;
    throw Error(e.code(), t.source + ":" + std::to_string(t.line_numbers[row]) + ": " + e.what());
  }
}

inline void write_mass_csv(std::ostream& out, std::span<const MassDistribution> masses) {
  out << "frame," << kMassColumns << "\n";
  for (std::size_t f = 0; f < masses.size(); ++f) out << f << "," << mass_row(masses[f]) << "\n";
}

namespace detail {
inline std::array<std::size_t, 4> mass_columns(const CsvTable& t) {
  return {t.require_column("m_empty"), t.require_column("m_R"), t.require_column("m_F"),
          t.require_column("m_omega")};
}
}  // namespace detail

/// Single-stream mass CSV with columns frame,m_empty,m_R,m_F,m_omega.
inline std::vector<MassDistribution> read_mass_csv(const CsvTable& t) {
  const auto cols = detail::mass_columns(t);
  const auto frame_col = t.column("frame");
  std::vector<MassDistribution> out;
  out.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (frame_col && t.index(r, *frame_col) != r) {
      throw Error(ErrorCode::ParseError, t.source + ":" + std::to_string(t.line_numbers[r]) +
                                             ": frames must be contiguous from 0");
    }
    out.push_back(parse_mass_row(t, r, cols));
  }
  return out;
}

using MassTrace = std::map<std::string, std::vector<MassDistribution>>;

/// Multi-action long format: frame,action,m_empty,m_R,m_F,m_omega.
inline void write_mass_trace_csv(std::ostream& out, const MassTrace& trace) {
  out << "frame,action," << kMassColumns << "\n";
  for (const auto& [action, masses] : trace) {
    for (std::size_t f = 0; f < masses.size(); ++f) {
      out << f << "," << action << "," << mass_row(masses[f]) << "\n";
    }
  }
}

inline MassTrace read_mass_trace_csv(const CsvTable& t) {
  const auto cols = detail::mass_columns(t);
  const auto frame_col = t.require_column("frame");
  const auto action_col = t.require_column("action");
  MassTrace out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    auto& stream = out[t.rows[r][action_col]];
    if (t.index(r, frame_col) != stream.size()) {
      throw Error(ErrorCode::ParseError, t.source + ":" + std::to_string(t.line_numbers[r]) +
                                             ": frames of '" + t.rows[r][action_col] +
                                             "' must be contiguous from 0");
    }
    stream.push_back(parse_mass_row(t, r, cols));
  }
  std::size_t n = out.empty() ? 0 : out.begin()->second.size();
  for (const auto& [action, masses] : out) {
    if (masses.size() != n) {
      throw Error(ErrorCode::RaggedRows, t.source + ": action '" + action + "' has " +
                                             std::to_string(masses.size()) + " frames, expected " +
                                             std::to_string(n));
    }
  }
  return out;
}

/// JSON map from subset label string (`{R,F}`) to mass; zero masses omitted.
inline json mass_to_json(const MassDistribution& m) {
  json j = json::object();
  for (Subset s = 0; s <= m.frame().omega(); ++s) {
    if (m[s] != 0.0) j[m.frame().format_subset(s)] = m[s];
  }
  return j;
}

inline MassDistribution mass_from_json(const FrameOfDiscernment& frame, const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "mass must be a JSON object");
  std::map<Subset, double> assignments;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number()) throw Error(ErrorCode::ParseError, "mass of '" + key + "' is not a number");
    assignments[frame.parse_subset(key)] += value.get<double>();
  }
  return make_mass(frame, assignments);
}

// ---------------------------------------------------------------------------
// Filter events

inline json event_to_json(const FilterEvent& e) {
  return std::visit(
      [](const auto& ev) -> json {
        using T = std::decay_t<decltype(ev)>;
        if constexpr (std::is_same_v<T, events::Warning>) {
          return {{"frame", ev.frame}, {"event", "warning"}};
        } else if constexpr (std::is_same_v<T, events::WarningCleared>) {
          return {{"frame", ev.frame}, {"event", "warning_cleared"}};
        } else if constexpr (std::is_same_v<T, events::ModelSwitch>) {
          return {{"frame", ev.frame},
                  {"event", "model_switch"},
                  {"f_w", ev.warn_frame},
                  {"f_s", ev.stop_frame},
                  {"new_target", std::string(to_string(ev.new_target))}};
        } else {
          return {{"frame", ev.frame},
                  {"event", "transition_interval"},
                  {"start", ev.start},
                  {"end", ev.end}};
        }
      },
      e);
}

inline FilterEvent event_from_json(const json& j) {
  const auto kind = j.at("event").get<std::string>();
  const auto frame = j.at("frame").get<std::size_t>();
  if (kind == "warning") return events::Warning{frame};
  if (kind == "warning_cleared") return events::WarningCleared{frame};
  if (kind == "model_switch") {
    const auto target = j.at("new_target").get<std::string>() == "R" ? ActionState::True
                                                                      : ActionState::False;
    return events::ModelSwitch{frame, j.at("f_w").get<std::size_t>(),
                               j.at("f_s").get<std::size_t>(), target};
  }
  if (kind == "transition_interval") {
    return events::TransitionInterval{frame, j.at("start").get<std::size_t>(),
                                      j.at("end").get<std::size_t>()};
  }
  throw Error(ErrorCode::ParseError, "unknown event kind '" + kind + "'");
}

inline void write_events_jsonl(std::ostream& out, std::span<const FilterEvent> log) {
  for (const auto& e : log) out << event_to_json(e).dump() << "\n";
}

// ---------------------------------------------------------------------------
// Ground truth and reports

/// `{"frames": N, "segments": {"action": [[start, end], ...]}}`
inline std::map<std::string, SegmentAnnotation> truth_from_json(const json& j) {
  std::map<std::string, SegmentAnnotation> out;
  try {
    for (const auto& [action, segs] : j.at("segments").items()) {
      SegmentAnnotation a{action, {}};
      for (const auto& s : segs) a.segments.push_back({s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>()});
      a.validate();
      out.emplace(action, std::move(a));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("ground truth: ") + e.what());
  }
  return out;
}

inline json truth_to_json(const std::map<std::string, SegmentAnnotation>& truth, std::size_t frames) {
  json segs = json::object();
  for (const auto& [action, a] : truth) {
    json list = json::array();
    for (const auto& s : a.segments) list.push_back({s.start, s.end});
    segs[action] = list;
  }
  return {{"frames", frames}, {"segments", segs}};
}

inline json metrics_to_json(const FrameMetrics& m) {
  return {{"recall", m.recall},
          {"precision", m.precision},
          {"truth_frames", m.truth_count},
          {"retrieved_frames", m.retrieved_count},
          {"correct_frames", m.hit_count}};
}

inline json action_report_to_json(const ActionReport& r) {
  json j = {{"action", r.action}, {"before", metrics_to_json(r.before)}};
  if (r.after) {
    j["after"] = metrics_to_json(*r.after);
    j["gain"] = {{"recall", r.recall_gain()}, {"precision", r.precision_gain()}};
  }
  return j;
}

inline json report_to_json(const EvalReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) rows.push_back(action_report_to_json(r));
  return {{"title", report.title}, {"actions", rows}, {"mean", action_report_to_json(report.mean_row())}};
}

/// frame,before[,after] with 0/1 cells.
inline void write_decisions_csv(std::ostream& out, const std::vector<bool>& before,
                                const std::vector<bool>* after) {
  out << "frame,before" << (after ? ",after" : "") << "\n";
  for (std::size_t f = 0; f < before.size(); ++f) {
    out << f << "," << (before[f] ? 1 : 0);
    if (after) out << "," << ((*after)[f] ? 1 : 0);
    out << "\n";
  }
}

struct DecisionColumns {
  std::vector<bool> before;
  std::optional<std::vector<bool>> after;
};

inline DecisionColumns read_decisions_csv(const CsvTable& t) {
  const auto before_col = t.require_column("before");
  const auto after_col = t.column("after");
  DecisionColumns d;
  if (after_col) d.after.emplace();
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    d.before.push_back(t.number(r, before_col) != 0.0);
    if (after_col) d.after->push_back(t.number(r, *after_col) != 0.0);
  }
  return d;
}

}  // namespace tbf::io
