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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tbf/belief.hpp"

/**
 * \file
 * \brief Evidential smoothing and switch detection for a binary action state.
 *
 * Each frame the filter predicts the action mass from the previous output
 * with an evolution model ("the state persists with confidence gamma",
 * applied with the disjunctive rule), fuses the prediction with the
 * measurement using the conjunctive rule, and accumulates the resulting
 * conflict in a CUSUM with forgetting factor lambda. Crossing the warning
 * threshold remembers the frame; crossing the stop threshold switches the
 * model and rewrites the transition interval as total ignorance.
 *
 * Outputs from the warning frame onward stay provisional until the warning
 * clears, the model switches or the stream ends. Finalized outputs are
 * collected with TemporalFilter::take_finalized().
 */

namespace tbf {

enum class ActionState : std::uint8_t { True, False };

constexpr ActionState opposite(ActionState s) noexcept {
  return s == ActionState::True ? ActionState::False : ActionState::True;
}

constexpr Subset singleton_of(ActionState s) noexcept {
  return s == ActionState::True ? binary::kTrue : binary::kFalse;
}

constexpr std::string_view to_string(ActionState s) noexcept {
  return s == ActionState::True ? "R" : "F";
}

/// "If the state is `target` at f-1 then it is `target` at f with belief gamma."
struct EvolutionModel {
  ActionState target = ActionState::False;
  double gamma = 0.9;
};

struct FilterConfig {
  double gamma_true = 0.9;
  double gamma_false = 0.9;
  double lambda = 0.9;  // CUSUM forgetting factor
  double t_stop = 3.0;
  double t_warn = 0.5;
  std::size_t w_max = 5;  // cap on the transition interval length
  std::size_t init_window = 5;
  double eps_zero = 1e-12;  // conflict at or below this counts as none

  void validate() const {
    auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in_unit(gamma_true) || !in_unit(gamma_false)) {
      throw Error(ErrorCode::InvalidFilterConfig, "gamma must lie in [0, 1]");
    }
    if (!in_unit(lambda)) throw Error(ErrorCode::InvalidFilterConfig, "lambda must lie in [0, 1]");
    if (!(t_warn > 0.0 && t_warn < t_stop)) {
      throw Error(ErrorCode::InvalidFilterConfig, "thresholds must satisfy 0 < t_warn < t_stop");
    }
    if (w_max < 1) throw Error(ErrorCode::InvalidFilterConfig, "w_max must be >= 1");
    if (init_window < 1) throw Error(ErrorCode::InvalidFilterConfig, "init_window must be >= 1");
    if (!(eps_zero >= 0.0)) throw Error(ErrorCode::InvalidFilterConfig, "eps_zero must be >= 0");
  }

  [[nodiscard]] EvolutionModel model_for(ActionState target) const noexcept {
    return {target, target == ActionState::True ? gamma_true : gamma_false};
  }
};

/// The evolution model as a mass: gamma on the target, the rest on Ω.
inline MassDistribution model_mass(const EvolutionModel& model) {
  if (!(model.gamma >= 0.0 && model.gamma <= 1.0)) {
    throw Error(ErrorCode::InvalidFilterConfig, "gamma must lie in [0, 1]");
  }
  std::vector<double> m(4, 0.0);
  m[singleton_of(model.target)] = model.gamma;
  m[binary::kOmega] = 1.0 - model.gamma;
  return {FrameOfDiscernment::binary(), std::move(m), detail::Trusted{}};
}

/// One-step prediction: model mass combined disjunctively with the previous
/// output. The prior may only carry mass on the model target and Ω.
inline MassDistribution predict(const MassDistribution& prev_out, const EvolutionModel& model) {
  if (!prev_out.frame().is_binary()) {
    throw Error(ErrorCode::FrameMismatch, "prediction needs the binary action frame");
  }
  const Subset other = singleton_of(opposite(model.target));
  if (prev_out[binary::kEmpty] != 0.0 || prev_out[other] != 0.0) {
    throw Error(ErrorCode::InconsistentPrior,
                "previous output has mass outside {" + std::string(to_string(model.target)) + ", Ω}");
  }
  return combine_disjunctive(model_mass(model), prev_out);
}

/// Restricts a binary mass to the consonant family {target, Ω}: mass on the
/// target is kept, everything else goes to Ω.
inline MassDistribution project_onto(const MassDistribution& m, ActionState target) {
  const Subset keep = singleton_of(target);
  std::vector<double> out(4, 0.0);
  out[keep] = m[keep];
  out[binary::kOmega] = 1.0 - m[keep];
  return {m.frame(), std::move(out), detail::Trusted{}};
}

namespace events {
struct Warning {
  std::size_t frame;
};
struct WarningCleared {
  std::size_t frame;
};
struct ModelSwitch {
  std::size_t frame;
  std::size_t warn_frame;
  std::size_t stop_frame;
  ActionState new_target;
};
struct TransitionInterval {
  std::size_t frame;
  std::size_t start;
  std::size_t end;  // inclusive
};
}  // namespace events

using FilterEvent = std::variant<events::Warning, events::WarningCleared, events::ModelSwitch,
                                 events::TransitionInterval>;

inline std::size_t event_frame(const FilterEvent& e) {
  return std::visit([](const auto& ev) { return ev.frame; }, e);
}

struct PendingFrame {
  std::size_t frame;
  MassDistribution measurement;
  MassDistribution output;
};

struct FilterState {
  EvolutionModel model;
  double cusum = 0.0;
  std::optional<std::size_t> warn_frame;
  MassDistribution prev_out = vacuous(FrameOfDiscernment::binary());
  std::size_t frame = 0;  // index of the next frame to process
  std::vector<PendingFrame> pending;

  static FilterState starting(EvolutionModel model) {
    FilterState s;
    s.model = model;
    return s;
  }
};

struct FinalizedFrame {
  std::size_t frame;
  MassDistribution mass;
};

struct StepResult {
  std::size_t frame;
  double conflict;
  double cusum;  // value reached at this frame, before any reset
  MassDistribution output;  // provisional unless the frame was finalized
  std::vector<FilterEvent> events;
};

namespace detail {

struct FusedFrame {
  MassDistribution output;
  double conflict;
};

// Prediction, conjunctive fusion with the measurement, and the output rule:
// trust the fusion when it is conflict free, otherwise keep the prediction.
inline FusedFrame fuse_with_model(const MassDistribution& prev, const EvolutionModel& model,
                                  const MassDistribution& measurement, double eps_zero) {
  auto pred = predict(prev, model);
  auto fused = combine_conjunctive(pred, measurement);
  const double eps = conflict_mass(fused);
  return {project_onto(eps <= eps_zero ? fused : pred, model.target), eps};
}

inline void require_measurement(const MassDistribution& m) {
  if (!(m.frame() == FrameOfDiscernment::binary())) {
    throw Error(ErrorCode::FrameMismatch, "measurement is not on the binary action frame");
  }
  if (m[binary::kEmpty] > 1e-12) {
    throw Error(ErrorCode::NonNormalizedMeasurement,
                "measurement carries conflict " + std::to_string(m[binary::kEmpty]));
  }
}

}  // namespace detail

class TemporalFilter {
 public:
  TemporalFilter(FilterConfig config, ActionState initial)
      : TemporalFilter(config, FilterState::starting(config.model_for(initial))) {}

  TemporalFilter(FilterConfig config, FilterState state)
      : config_(config), state_(std::move(state)) {
    config_.validate();
  }

  StepResult step(const MassDistribution& measurement) {
    detail::require_measurement(measurement);
    const std::size_t f = state_.frame;
    auto fused = detail::fuse_with_model(state_.prev_out, state_.model, measurement,
                                         config_.eps_zero);
    state_.cusum = state_.cusum * config_.lambda + fused.conflict;
    state_.prev_out = fused.output;

    StepResult result{f, fused.conflict, state_.cusum, fused.output, {}};
    if (state_.cusum >= config_.t_warn && !state_.warn_frame) {
      state_.warn_frame = f;
      result.events.emplace_back(events::Warning{f});
    } else if (state_.cusum < config_.t_warn && state_.warn_frame) {
      // Old conflict expired through forgetting: keep the buffered outputs.
      state_.warn_frame.reset();
      commit_pending();
      result.events.emplace_back(events::WarningCleared{f});
    }

    if (state_.warn_frame) {
      state_.pending.push_back({f, measurement, fused.output});
    } else {
      finalized_.push_back({f, fused.output});
    }

    if (state_.cusum >= config_.t_stop) switch_model(f, result);
    ++state_.frame;
    return result;
  }

  /// End of stream: provisional outputs become final as they are.
  void finish() {
    commit_pending();
    state_.warn_frame.reset();
  }

  /// Finalized outputs produced since the last call, in frame order.
  std::vector<FinalizedFrame> take_finalized() { return std::exchange(finalized_, {}); }

  [[nodiscard]] const FilterState& state() const noexcept { return state_; }
  [[nodiscard]] const FilterConfig& config() const noexcept { return config_; }

 private:
  void commit_pending() {
    for (auto& p : state_.pending) finalized_.push_back({p.frame, std::move(p.output)});
    state_.pending.clear();
  }

  void switch_model(std::size_t stop_frame, StepResult& result) {
    const std::size_t warn_frame = *state_.warn_frame;
    const std::size_t it_end = std::min(stop_frame, warn_frame + config_.w_max);
    const auto new_model = config_.model_for(opposite(state_.model.target));
    const auto ignorance = vacuous(FrameOfDiscernment::binary());

    // The transition interval becomes ignorance; anything after it is replayed
    // under the new model from a vacuous prior.
    MassDistribution prev = ignorance;
    for (const auto& p : state_.pending) {
      if (p.frame <= it_end) {
        finalized_.push_back({p.frame, ignorance});
        continue;
      }
      prev = detail::fuse_with_model(prev, new_model, p.measurement, config_.eps_zero).output;
      finalized_.push_back({p.frame, prev});
    }
    state_.pending.clear();
    result.output = prev;

    state_.prev_out = std::move(prev);
    state_.model = new_model;
    state_.cusum = 0.0;
    state_.warn_frame.reset();
    result.events.emplace_back(
        events::ModelSwitch{stop_frame, warn_frame, stop_frame, new_model.target});
    result.events.emplace_back(events::TransitionInterval{stop_frame, warn_frame, it_end});
  }

  FilterConfig config_;
  FilterState state_;
  std::vector<FinalizedFrame> finalized_;
};

/// Terminal CUSUM of one model over a window, starting from certainty in the
/// model's target.
inline double trial_cusum(std::span<const MassDistribution> window, const FilterConfig& config,
                          ActionState target) {
  const auto model = config.model_for(target);
  auto prev = categorical(FrameOfDiscernment::binary(), singleton_of(target));
  double cusum = 0.0;
  for (const auto& m : window) {
    detail::require_measurement(m);
    auto fused = detail::fuse_with_model(prev, model, m, config.eps_zero);
    cusum = cusum * config.lambda + fused.conflict;
    prev = std::move(fused.output);
  }
  return cusum;
}

/// Picks the model whose CUSUM over the first `init_window` measurements is
/// smaller; ties go to the "false" model. Shorter inputs use all frames.
inline FilterState initialize(std::span<const MassDistribution> measurements,
                              const FilterConfig& config) {
  config.validate();
  if (measurements.empty()) throw Error(ErrorCode::EmptyInput, "no measurements to initialize from");
  const auto window = measurements.first(std::min(config.init_window, measurements.size()));
  const double cs_true = trial_cusum(window, config, ActionState::True);
  const double cs_false = trial_cusum(window, config, ActionState::False);
  const auto target = cs_true < cs_false ? ActionState::True : ActionState::False;
  return FilterState::starting(config.model_for(target));
}

struct BatchResult {
  ActionState initial_target = ActionState::False;
  std::vector<MassDistribution> outputs;  // finalized, one per input frame
  std::vector<double> conflict;
  std::vector<double> cusum;
  std::vector<FilterEvent> events;
};

inline BatchResult run_batch(std::span<const MassDistribution> measurements,
                             const FilterConfig& config) {
  auto state = initialize(measurements, config);
  BatchResult out;
  out.initial_target = state.model.target;
  TemporalFilter filter(config, std::move(state));
  out.conflict.reserve(measurements.size());
  out.cusum.reserve(measurements.size());
  for (const auto& m : measurements) {
    auto r = filter.step(m);
    out.conflict.push_back(r.conflict);
    out.cusum.push_back(r.cusum);
    for (auto& e : r.events) out.events.push_back(std::move(e));
  }
  filter.finish();
  out.outputs.assign(measurements.size(), vacuous(FrameOfDiscernment::binary()));
  for (auto& f : filter.take_finalized()) out.outputs.at(f.frame) = std::move(f.mass);
  return out;
}

}  // namespace tbf
