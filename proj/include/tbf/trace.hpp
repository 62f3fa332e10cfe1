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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tbf/io.hpp"

namespace tbf {

/// Per-frame numeric parameter values with per-parameter reliabilities.
struct ParameterTrace {
  std::vector<std::string> schema;
  std::vector<std::vector<double>> values;  // [frame][parameter]
  std::vector<std::vector<double>> alphas;  // [frame][parameter], 1 when not given

  [[nodiscard]] std::size_t frames() const noexcept { return values.size(); }

  [[nodiscard]] std::optional<std::size_t> index_of(std::string_view id) const {
    for (std::size_t i = 0; i < schema.size(); ++i) {
      if (schema[i] == id) return i;
    }
    return std::nullopt;
  }
};

/// Header-driven: `frame` is optional and must count from 0, `alpha_<id>`
/// columns carry the reliability of parameter `<id>`, every other column is a
/// parameter.
inline ParameterTrace parse_trace(const io::CsvTable& t) {
  constexpr std::string_view kAlphaPrefix = "alpha_";
  ParameterTrace trace;
  std::vector<std::size_t> value_cols;
  std::vector<std::pair<std::string, std::size_t>> alpha_cols;
  std::optional<std::size_t> frame_col;
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    const auto& name = t.header[c];
    if (name == "frame") {
      frame_col = c;
    } else if (name.starts_with(kAlphaPrefix)) {
      alpha_cols.emplace_back(name.substr(kAlphaPrefix.size()), c);
    } else {
      if (trace.index_of(name)) throw Error(ErrorCode::ParseError, t.source + ": duplicate column '" + name + "'");
      trace.schema.push_back(name);
      value_cols.push_back(c);
    }
  }
  std::vector<std::optional<std::size_t>> alpha_of(trace.schema.size());
  for (const auto& [id, col] : alpha_cols) {
    const auto p = trace.index_of(id);
    if (!p) {
      throw Error(ErrorCode::ParseError,
                  t.source + ": reliability column 'alpha_" + id + "' has no parameter column");
    }
    alpha_of[*p] = col;
  }

  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (frame_col && t.index(r, *frame_col) != r) {
      throw Error(ErrorCode::ParseError, t.source + ":" + std::to_string(t.line_numbers[r]) +
                                             ": frames must be contiguous from 0");
    }
    std::vector<double> vals, alphas;
    for (std::size_t p = 0; p < trace.schema.size(); ++p) {
      vals.push_back(t.number(r, value_cols[p]));
      double a = alpha_of[p] ? t.number(r, *alpha_of[p]) : 1.0;
      if (!(a >= 0.0 && a <= 1.0)) {
        throw Error(ErrorCode::ParseError, t.source + ":" + std::to_string(t.line_numbers[r]) +
                                               ": reliability of '" + trace.schema[p] +
                                               "' outside [0, 1]");
      }
      alphas.push_back(a);
    }
    trace.values.push_back(std::move(vals));
    trace.alphas.push_back(std::move(alphas));
  }
  return trace;
}

inline ParameterTrace load_trace(const std::filesystem::path& path) {
  return parse_trace(io::read_csv_file(path));
}

}  // namespace tbf
