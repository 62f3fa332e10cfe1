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

// Command line front end: simulate | run | filter | eval.
// Exit codes: 0 success, 1 configuration error, 2 I/O or parse error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tbf/config.hpp"
#include "tbf/io.hpp"
#include "tbf/pipeline.hpp"
#include "tbf/synthetic.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;

namespace fs = std::filesystem;

struct CommonArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> threshold;
  std::string out_dir;
  bool no_filter = false;
};

tbf::PipelineConfig config_or_default(const std::string& path) {
  return path.empty() ? tbf::PipelineConfig{} : tbf::load_config(path);
}

fs::path out_dir_for(const CommonArgs& args, const tbf::PipelineConfig& config) {
  return args.out_dir.empty() ? config.out_dir : fs::path(args.out_dir);
}

tbf::SyntheticSpec synthetic_spec(const CommonArgs& args, const tbf::PipelineConfig& config) {
  if (!config.synthetic) {
    throw tbf::Error(tbf::ErrorCode::ConfigError, "config has no \"synthetic\" section");
  }
  auto spec = *config.synthetic;
  if (args.seed) spec.seed = *args.seed;
  return spec;
}

void write_truth(const fs::path& dir, const std::map<std::string, tbf::SegmentAnnotation>& truth,
                 std::size_t frames) {
  fs::create_directories(dir);
  auto out = tbf::io::open_out(dir / "truth.json");
  out << tbf::io::truth_to_json(truth, frames).dump(2) << "\n";
}

int simulate(const CommonArgs& args) {
  const auto config = config_or_default(args.config);
  const auto data = tbf::generate_synthetic(synthetic_spec(args, config));
  const auto dir = out_dir_for(args, config);
  fs::create_directories(dir);
  {
    auto out = tbf::io::open_out(dir / "masses.csv");
    tbf::io::write_mass_trace_csv(out, data.masses);
  }
  write_truth(dir, data.truth, data.frames);
  std::cout << "wrote " << (dir / "masses.csv").string() << " and " << (dir / "truth.json").string()
            << "\n";
  return 0;
}

int run(const CommonArgs& args, const std::string& trace_path, const std::string& masses_path,
        const std::string& truth_path) {
  const auto config = config_or_default(args.config);
  const auto dir = out_dir_for(args, config);
  tbf::PipelineInput input{tbf::io::MassTrace{}, std::nullopt};
  if (!trace_path.empty()) {
    input.data = tbf::load_trace(trace_path);
  } else if (!masses_path.empty()) {
    input.data = tbf::io::read_mass_trace_csv(tbf::io::read_csv_file(masses_path));
  } else {
    auto data = tbf::generate_synthetic(synthetic_spec(args, config));
    write_truth(dir, data.truth, data.frames);
    input.data = std::move(data.masses);
    input.truth = std::move(data.truth);
  }
  if (!truth_path.empty()) input.truth = tbf::io::truth_from_json(tbf::io::read_json_file(truth_path));

  tbf::RunOptions options{!args.no_filter, args.threshold};
  const auto result = tbf::run_pipeline(config, input, options);
  const auto written = tbf::write_artifacts(result, dir);
  if (result.report) std::cout << tbf::render_table(*result.report);
  std::cout << written.size() << " artifacts written to " << dir.string() << "\n";
  return 0;
}

int filter(const CommonArgs& args, const std::string& input_path) {
  const auto config = config_or_default(args.config);
  const auto dir = out_dir_for(args, config);
  const auto masses = tbf::io::read_mass_csv(tbf::io::read_csv_file(input_path));
  std::vector<tbf::MassDistribution> measurements;
  measurements.reserve(masses.size());
  for (const auto& m : masses) measurements.push_back(tbf::as_measurement(m));
  const auto batch = tbf::run_batch(measurements, config.filter);

  fs::create_directories(dir);
  {
    auto out = tbf::io::open_out(dir / "filtered.csv");
    tbf::io::write_mass_csv(out, batch.outputs);
  }
  {
    auto out = tbf::io::open_out(dir / "events.jsonl");
    tbf::io::write_events_jsonl(out, batch.events);
  }
  {
    auto out = tbf::io::open_out(dir / "plot.csv");
    out << "frame," << tbf::io::kMassColumns << ",cusum\n";
    for (std::size_t f = 0; f < batch.outputs.size(); ++f) {
      out << f << "," << tbf::io::mass_row(batch.outputs[f]) << ","
          << tbf::io::format_double(batch.cusum[f]) << "\n";
    }
  }
  std::cout << batch.outputs.size() << " frames filtered, " << batch.events.size()
            << " events, initial model " << tbf::to_string(batch.initial_target) << "\n";
  return 0;
}

int eval(const CommonArgs& args, const std::string& truth_path,
         const std::vector<std::string>& decision_args) {
  const auto truth = tbf::io::truth_from_json(tbf::io::read_json_file(truth_path));
  tbf::EvalReport report;
  for (const auto& entry : decision_args) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos) {
      throw tbf::Error(tbf::ErrorCode::ConfigError, "--decisions expects action=path, got '" + entry + "'");
    }
    const auto action = entry.substr(0, eq);
    const auto it = truth.find(action);
    if (it == truth.end()) {
      throw tbf::Error(tbf::ErrorCode::ConfigError, "no ground truth for action '" + action + "'");
    }
    const auto d = tbf::io::read_decisions_csv(tbf::io::read_csv_file(entry.substr(eq + 1)));
    report.rows.push_back(d.after ? tbf::gain_report(d.before, *d.after, it->second)
                                  : tbf::before_only_report(d.before, it->second));
  }
  std::cout << tbf::render_table(report);
  if (!args.out_dir.empty()) {
    fs::create_directories(args.out_dir);
    {
      auto out = tbf::io::open_out(fs::path(args.out_dir) / "report.json");
      out << tbf::io::report_to_json(report).dump(2) << "\n";
    }
    auto out = tbf::io::open_out(fs::path(args.out_dir) / "report.txt");
    out << tbf::render_table(report);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evidential smoothing and change detection of per-frame action beliefs"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string trace_path, masses_path, truth_path, input_path;
  std::vector<std::string> decision_args;

  auto add_common = [&](CLI::App* sub, bool filter_flags) {
    sub->add_option("--config", args.config, "Pipeline configuration (JSON)");
    sub->add_option("--out-dir", args.out_dir, "Directory for emitted artifacts");
    if (filter_flags) {
      sub->add_option("--seed", args.seed, "Override the synthetic generator seed");
      sub->add_option("--threshold", args.threshold, "Decision threshold on BetP(R)");
      sub->add_flag("--no-filter", args.no_filter, "Skip the temporal filter");
    }
  };

  auto* sim = app.add_subcommand("simulate", "Generate a labeled synthetic mass trace");
  add_common(sim, false);
  sim->add_option("--seed", args.seed, "Override the synthetic generator seed");

  auto* run_cmd = app.add_subcommand("run", "Fuzzify, fuse, filter, decide and evaluate");
  add_common(run_cmd, true);
  auto* trace_opt = run_cmd->add_option("--trace", trace_path, "Parameter trace CSV");
  run_cmd->add_option("--masses", masses_path, "Pre-fused mass trace CSV (frame,action,m_empty,m_R,m_F,m_omega)")
      ->excludes(trace_opt);
  run_cmd->add_option("--truth", truth_path, "Ground-truth segments (JSON)");

  auto* filter_cmd = app.add_subcommand("filter", "Filter one pre-fused mass stream");
  add_common(filter_cmd, false);
  filter_cmd->add_option("--input", input_path, "Mass CSV (frame,m_empty,m_R,m_F,m_omega)")->required();

  auto* eval_cmd = app.add_subcommand("eval", "Score decisions against ground truth");
  eval_cmd->add_option("--out-dir", args.out_dir, "Directory for report.json and report.txt");
  eval_cmd->add_option("--truth", truth_path, "Ground-truth segments (JSON)")->required();
  eval_cmd->add_option("--decisions", decision_args, "action=decisions.csv, repeatable")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*sim) return simulate(args);
    if (*run_cmd) return run(args, trace_path, masses_path, truth_path);
    if (*filter_cmd) return filter(args, input_path);
    if (*eval_cmd) return eval(args, truth_path, decision_args);
  } catch (const tbf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case tbf::ErrorCode::ParseError:
      case tbf::ErrorCode::RaggedRows:
      case tbf::ErrorCode::IoError:
      case tbf::ErrorCode::NotNormalized:
      case tbf::ErrorCode::NegativeMass:
      case tbf::ErrorCode::NonFiniteInput:
      case tbf::ErrorCode::InvalidAnnotation:
      case tbf::ErrorCode::PartitionOverlap:
      case tbf::ErrorCode::EmptyInput:
        return kExitIo;
      default:
        return kExitConfig;
    }
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitConfig;
}
