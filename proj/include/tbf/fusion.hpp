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

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tbf/belief.hpp"

namespace tbf {

/// Logic rule over parameter states. AND maps to the conjunctive rule and OR
/// to the disjunctive rule; leaves are discounted by their reliability first.
class RuleExpr {
 public:
  enum class Kind { Leaf, And, Or };

  static RuleExpr leaf(std::string parameter) {
    RuleExpr r;
    r.kind_ = Kind::Leaf;
    r.parameter_ = std::move(parameter);
    return r;
  }
  static RuleExpr all_of(std::vector<RuleExpr> children) {
    return with_children(Kind::And, std::move(children));
  }
  static RuleExpr any_of(std::vector<RuleExpr> children) {
    return with_children(Kind::Or, std::move(children));
  }

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] const std::string& parameter() const noexcept { return parameter_; }
  [[nodiscard]] const std::vector<RuleExpr>& children() const noexcept { return children_; }

  /// Every parameter id referenced by a leaf.
  void collect_parameters(std::set<std::string>& out) const {
    if (kind_ == Kind::Leaf) {
      out.insert(parameter_);
      return;
    }
    for (const auto& c : children_) c.collect_parameters(out);
  }

  [[nodiscard]] bool contains_and() const {
    if (kind_ == Kind::And) return true;
    for (const auto& c : children_) {
      if (c.contains_and()) return true;
    }
    return false;
  }

 private:
  static RuleExpr with_children(Kind kind, std::vector<RuleExpr> children) {
    if (children.size() < 2) {
      throw Error(ErrorCode::InvalidRule, "and/or nodes need at least two children");
    }
    RuleExpr r;
    r.kind_ = kind;
    r.children_ = std::move(children);
    return r;
  }

  Kind kind_ = Kind::Leaf;
  std::string parameter_;
  std::vector<RuleExpr> children_;
};

struct SourceEvidence {
  MassDistribution mass;
  double alpha = 1.0;
};

/// Per-parameter evidence for one frame, all on the same binary action frame.
using FrameEvidence = std::map<std::string, SourceEvidence, std::less<>>;

inline MassDistribution evaluate_rule(const RuleExpr& rule, const FrameEvidence& evidence) {
  switch (rule.kind()) {
    case RuleExpr::Kind::Leaf: {
      const auto it = evidence.find(rule.parameter());
      if (it == evidence.end()) {
        throw Error(ErrorCode::MissingParameter, "no evidence for '" + rule.parameter() + "'");
      }
      return discount(it->second.mass, it->second.alpha);
    }
    case RuleExpr::Kind::And:
    case RuleExpr::Kind::Or: {
      const bool conj = rule.kind() == RuleExpr::Kind::And;
      const auto& kids = rule.children();
      MassDistribution acc = evaluate_rule(kids.front(), evidence);
      for (std::size_t i = 1; i < kids.size(); ++i) {
        const auto next = evaluate_rule(kids[i], evidence);
        acc = conj ? combine_conjunctive(acc, next) : combine_disjunctive(acc, next);
      }
      return acc;
    }
  }
  throw Error(ErrorCode::InvalidRule, "unknown rule kind");
}

/// Evaluates each action's rule independently on the same frame evidence.
inline std::map<std::string, MassDistribution> fuse_frame(
    const std::map<std::string, RuleExpr>& rules, const FrameEvidence& evidence) {
  std::map<std::string, MassDistribution> out;
  for (const auto& [action, rule] : rules) out.emplace(action, evaluate_rule(rule, evidence));
  return out;
}

}  // namespace tbf
