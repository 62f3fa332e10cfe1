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
#include <initializer_list>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "tbf/fusion.hpp"
#include "tbf/fuzzify.hpp"
#include "tbf/io.hpp"
#include "tbf/synthetic.hpp"
#include "tbf/temporal_filter.hpp"
#include "tbf/trace.hpp"

/**
 * \file
 * \brief Pipeline configuration and its JSON form.
 *
 * \code{.json}
 * {
 *   "filter": {"lambda": 0.9, "gamma_true": 0.9, "gamma_false": 0.9,
 *              "t_stop": 3, "t_warn": 0.5, "w_max": 5, "init_window": 5},
 *   "threshold": 0.5,
 *   "partitions": {
 *     "stride": {"true": [0.2, 0.4, null, null], "false": [null, null, 0.1, 0.3],
 *                "range": [0, 1]}
 *   },
 *   "rules": {"run": {"and": [{"param": "stride"}, {"param": "cam_tx"}]}},
 *   "synthetic": {"seed": 42, "frames": 500, "noise": 0.1,
 *                 "actions": {"jump": {"segments": [[100, 180]],
 *                                      "false_alarms": [{"frame": 130, "duration": 3,
 *                                                        "intensity": 0.8}]}}},
 *   "out_dir": "out"
 * }
 * \endcode
 *
 * Every section is optional; the filter defaults are λ = 0.9, γ = 0.9,
 * stop 3, warning 0.5 and a transition cap of 5 frames.
 */

namespace tbf {

struct PipelineConfig {
  std::map<std::string, FuzzyPartition> partitions;
  std::map<std::string, RuleExpr> rules;
  FilterConfig filter;
  double threshold = 0.5;
  std::optional<SyntheticSpec> synthetic;
  std::filesystem::path out_dir = "out";

  /// Rules may only reference parameters that have a partition.
  void validate() const {
    filter.validate();
    if (!std::isfinite(threshold)) throw Error(ErrorCode::ConfigError, "threshold must be finite");
    for (const auto& [action, rule] : rules) {
      std::set<std::string> params;
      rule.collect_parameters(params);
      for (const auto& p : params) {
        if (!partitions.contains(p)) {
          throw Error(ErrorCode::ConfigError,
                      "rule '" + action + "' uses parameter '" + p + "' without a partition");
        }
      }
    }
    if (synthetic) synthetic->validate();
  }

  /// The trace must provide a column for every rule leaf.
  void validate_against(const ParameterTrace& trace) const {
    if (rules.empty()) throw Error(ErrorCode::ConfigError, "parameter traces need at least one rule");
    for (const auto& [action, rule] : rules) {
      std::set<std::string> params;
      rule.collect_parameters(params);
      for (const auto& p : params) {
        if (!trace.index_of(p)) {
          throw Error(ErrorCode::ConfigError,
                      "rule '" + action + "' uses parameter '" + p + "' missing from the trace");
        }
      }
    }
  }
};

namespace detail {

using io::json;

inline void reject_unknown_keys(const json& j, std::initializer_list<std::string_view> known,
                                const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (auto k : known) ok = ok || key == k;
    if (!ok) throw Error(ErrorCode::ConfigError, where + ": unknown key '" + key + "'");
  }
}

inline Trapezoid trapezoid_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 4) {
    throw Error(ErrorCode::ConfigError, where + ": expected [a, b, c, d] with null for open plateaus");
  }
  Trapezoid t;
  std::optional<double>* knots[] = {&t.a, &t.b, &t.c, &t.d};
  for (std::size_t i = 0; i < 4; ++i) {
    if (j[i].is_null()) continue;
    if (!j[i].is_number()) throw Error(ErrorCode::ConfigError, where + ": knots must be numbers or null");
    *knots[i] = j[i].get<double>();
  }
  try {
    t.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, where + ": " + e.what());
  }
  return t;
}

inline FuzzyPartition partition_from_json(const json& j, const std::string& name) {
  const std::string where = "partitions." + name;
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, where + ": expected an object");
  reject_unknown_keys(j, {"true", "false", "range"}, where);
  const auto mu_true = trapezoid_from_json(j.at("true"), where + ".true");
  const auto mu_false = trapezoid_from_json(j.at("false"), where + ".false");
  double lo = 0.0, hi = 0.0;
  if (j.contains("range")) {
    lo = j.at("range").at(0).get<double>();
    hi = j.at("range").at(1).get<double>();
  } else {
    // Default range: the finite knots padded by one unit on either side.
    std::vector<double> knots = mu_true.finite_knots();
    for (double k : mu_false.finite_knots()) knots.push_back(k);
    if (knots.empty()) knots.push_back(0.0);
    lo = *std::min_element(knots.begin(), knots.end()) - 1.0;
    hi = *std::max_element(knots.begin(), knots.end()) + 1.0;
  }
  try {
    return make_partition(mu_true, mu_false, lo, hi);
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, where + ": " + e.what());
  }
}

inline FilterConfig filter_from_json(const json& j) {
  reject_unknown_keys(j, {"gamma_true", "gamma_false", "lambda", "t_stop", "t_warn", "w_max",
                          "init_window", "eps_zero"},
                      "filter");
  FilterConfig c;
  c.gamma_true = j.value("gamma_true", c.gamma_true);
  c.gamma_false = j.value("gamma_false", c.gamma_false);
  c.lambda = j.value("lambda", c.lambda);
  c.t_stop = j.value("t_stop", c.t_stop);
  c.t_warn = j.value("t_warn", c.t_warn);
  c.w_max = j.value("w_max", c.w_max);
  c.init_window = j.value("init_window", c.init_window);
  c.eps_zero = j.value("eps_zero", c.eps_zero);
  return c;
}

inline SyntheticSpec synthetic_from_json(const json& j) {
  reject_unknown_keys(j, {"seed", "frames", "noise", "doubt_floor", "actions"}, "synthetic");
  SyntheticSpec s;
  s.seed = j.value("seed", s.seed);
  s.frames = j.value("frames", s.frames);
  s.noise = j.value("noise", s.noise);
  s.doubt_floor = j.value("doubt_floor", s.doubt_floor);
  for (const auto& [name, a] : j.at("actions").items()) {
    reject_unknown_keys(a, {"segments", "false_alarms"}, "synthetic.actions." + name);
    SyntheticAction action;
    for (const auto& seg : a.value("segments", json::array())) {
      action.segments.push_back({seg.at(0).get<std::size_t>(), seg.at(1).get<std::size_t>()});
    }
    for (const auto& fa : a.value("false_alarms", json::array())) {
      action.false_alarms.push_back({fa.at("frame").get<std::size_t>(),
                                     fa.value("duration", std::size_t{1}),
                                     fa.value("intensity", 1.0)});
    }
    s.actions.emplace(name, std::move(action));
  }
  return s;
}

}  // namespace detail

/// `{"param": id}`, `{"and": [...]}` or `{"or": [...]}`, nested freely.
inline RuleExpr rule_from_json(const io::json& j) {
  if (!j.is_object() || j.size() != 1) {
    throw Error(ErrorCode::InvalidRule, "rule nodes are single-key objects: param, and, or");
  }
  const auto& [key, value] = *j.items().begin();
  if (key == "param") {
    if (!value.is_string()) throw Error(ErrorCode::InvalidRule, "param must name a parameter");
    return RuleExpr::leaf(value.get<std::string>());
  }
  if (key == "and" || key == "or") {
    if (!value.is_array()) throw Error(ErrorCode::InvalidRule, key + " expects an array");
    std::vector<RuleExpr> children;
    for (const auto& c : value) children.push_back(rule_from_json(c));
    return key == "and" ? RuleExpr::all_of(std::move(children))
                        : RuleExpr::any_of(std::move(children));
  }
  throw Error(ErrorCode::InvalidRule, "unknown rule node '" + key + "'");
}

inline PipelineConfig config_from_json(const io::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "config must be a JSON object");
  PipelineConfig c;
  try {
    detail::reject_unknown_keys(j, {"filter", "threshold", "partitions", "rules", "synthetic", "out_dir"},
                                "config");
    if (j.contains("filter")) c.filter = detail::filter_from_json(j.at("filter"));
    c.threshold = j.value("threshold", c.threshold);
    if (j.contains("partitions")) {
      for (const auto& [name, p] : j.at("partitions").items()) {
        c.partitions.emplace(name, detail::partition_from_json(p, name));
      }
    }
    if (j.contains("rules")) {
      for (const auto& [action, r] : j.at("rules").items()) {
        try {
          c.rules.emplace(action, rule_from_json(r));
        } catch (const Error& e) {
          throw Error(ErrorCode::ConfigError, "rules." + action + ": " + e.what());
        }
      }
    }
    if (j.contains("synthetic")) c.synthetic = detail::synthetic_from_json(j.at("synthetic"));
    if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
  } catch (const io::json::exception& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
  try {
    c.validate();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    throw Error(ErrorCode::ConfigError, e.what());
  }
  return c;
}

inline PipelineConfig load_config(const std::filesystem::path& path) {
  auto in = io::open_in(path);
  io::json j;
  try {
    j = io::json::parse(in);
  } catch (const io::json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace tbf
