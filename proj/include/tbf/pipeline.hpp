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
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tbf/config.hpp"
#include "tbf/eval.hpp"
#include "tbf/fusion.hpp"
#include "tbf/fuzzify.hpp"
#include "tbf/io.hpp"
#include "tbf/temporal_filter.hpp"
#include "tbf/trace.hpp"

namespace tbf {

/// Either raw parameter values (fuzzified and fused per the config) or
/// already fused per-action masses.
struct PipelineInput {
  std::variant<ParameterTrace, io::MassTrace> data;
  std::optional<std::map<std::string, SegmentAnnotation>> truth;
};

struct RunOptions {
  bool filter = true;
  std::optional<double> threshold;  // overrides the config
};

struct ActionRun {
  std::string action;
  std::vector<MassDistribution> raw;           // fusion output, conflict kept
  std::vector<MassDistribution> measurements;  // what the filter sees
  std::optional<BatchResult> filtered;
  std::vector<bool> before;
  std::optional<std::vector<bool>> after;
  std::optional<ActionReport> report;
};

struct PipelineResult {
  std::size_t frames = 0;
  std::vector<ActionRun> actions;
  std::optional<EvalReport> report;
};

/// Fuzzifies every parameter and evaluates each action's rule, frame by frame.
inline io::MassTrace fuse_trace(const PipelineConfig& config, const ParameterTrace& trace) {
  config.validate_against(trace);
  io::MassTrace out;
  for (const auto& [action, rule] : config.rules) out[action].reserve(trace.frames());
  for (std::size_t f = 0; f < trace.frames(); ++f) {
    FrameEvidence evidence;
    for (std::size_t p = 0; p < trace.schema.size(); ++p) {
      const auto it = config.partitions.find(trace.schema[p]);
      if (it == config.partitions.end()) continue;
      try {
        evidence.emplace(trace.schema[p],
                         SourceEvidence{fuzzify_value(trace.values[f][p], it->second),
                                        trace.alphas[f][p]});
      } catch (const Error& e) {
        throw Error(e.code(), "frame " + std::to_string(f) + ", parameter '" + trace.schema[p] +
                                  "': " + e.what());
      }
    }
    for (auto& [action, masses] : fuse_frame(config.rules, evidence)) {
      out[action].push_back(std::move(masses));
    }
  }
  return out;
}

/// Fusion can leave conflict on the measurement; the filter takes the
/// Dempster-normalized version, and total conflict becomes ignorance.
inline MassDistribution as_measurement(const MassDistribution& raw) {
  if (1.0 - conflict_mass(raw) <= kNormalizeFloor) return vacuous(raw.frame());
  return dempster_normalize(raw);
}

inline PipelineResult run_pipeline(const PipelineConfig& config, const PipelineInput& input,
                                   const RunOptions& options = {}) {
  config.validate();
  const double threshold = options.threshold.value_or(config.threshold);
  io::MassTrace fused = std::holds_alternative<ParameterTrace>(input.data)
                            ? fuse_trace(config, std::get<ParameterTrace>(input.data))
                            : std::get<io::MassTrace>(input.data);

  PipelineResult result;
  result.frames = fused.empty() ? 0 : fused.begin()->second.size();
  if (input.truth) {
    for (const auto& [action, a] : *input.truth) {
      if (!fused.contains(action)) {
        throw Error(ErrorCode::ConfigError, "ground truth names unknown action '" + action + "'");
      }
    }
    result.report = EvalReport{};
  }

  for (auto& [action, raw] : fused) {
    if (raw.size() != result.frames) {
      throw Error(ErrorCode::RaggedRows, "action '" + action + "' has a different frame count");
    }
    ActionRun run;
    run.action = action;
    run.measurements.reserve(raw.size());
    for (const auto& m : raw) run.measurements.push_back(as_measurement(m));
    run.raw = std::move(raw);
    run.before = decide_all(run.measurements, threshold);
    if (options.filter && !run.measurements.empty()) {
      run.filtered = run_batch(run.measurements, config.filter);
      run.after = decide_all(run.filtered->outputs, threshold);
    }
    if (input.truth) {
      if (const auto it = input.truth->find(action); it != input.truth->end()) {
        run.report = run.after ? gain_report(run.before, *run.after, it->second)
                               : before_only_report(run.before, it->second);
        result.report->rows.push_back(*run.report);
      }
    }
    result.actions.push_back(std::move(run));
  }
  return result;
}

/// Writes the per-action artifacts plus the aggregate report; returns the
/// paths written, in order.
///
/// Per action: `<a>_raw.csv`, `<a>_decisions.csv`, and when filtered
/// `<a>_filtered.csv`, `<a>_events.jsonl`, `<a>_plot.csv`; with ground truth
/// `<a>_eval.json`. Aggregate: `report.json` and `report.txt`.
inline std::vector<std::filesystem::path> write_artifacts(const PipelineResult& result,
                                                          const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create '" + out_dir.string() + "': " + ec.message());

  std::vector<std::filesystem::path> written;
  auto open = [&](const std::string& name) {
    written.push_back(out_dir / name);
    return io::open_out(written.back());
  };

  for (const auto& run : result.actions) {
    {
      auto out = open(run.action + "_raw.csv");
      io::write_mass_csv(out, run.raw);
    }
    if (run.filtered) {
      {
        auto out = open(run.action + "_filtered.csv");
        io::write_mass_csv(out, run.filtered->outputs);
      }
      {
        auto out = open(run.action + "_events.jsonl");
        io::write_events_jsonl(out, run.filtered->events);
      }
      {
        auto out = open(run.action + "_plot.csv");
        out << "frame," << io::kMassColumns << ",cusum\n";
        for (std::size_t f = 0; f < run.filtered->outputs.size(); ++f) {
          out << f << "," << io::mass_row(run.filtered->outputs[f]) << ","
              << io::format_double(run.filtered->cusum[f]) << "\n";
        }
      }
    }
    {
      auto out = open(run.action + "_decisions.csv");
      io::write_decisions_csv(out, run.before, run.after ? &*run.after : nullptr);
    }
    if (run.report) {
      auto out = open(run.action + "_eval.json");
      out << io::action_report_to_json(*run.report).dump(2) << "\n";
    }
  }
  if (result.report) {
    {
      auto out = open("report.json");
      out << io::report_to_json(*result.report).dump(2) << "\n";
    }
    auto out = open("report.txt");
    out << render_table(*result.report);
  }
  return written;
}

}  // namespace tbf
