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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracle.hpp"
#include "tbf/temporal_filter.hpp"

namespace {

using namespace tbf;
using binary::kEmpty;
using binary::kFalse;
using binary::kOmega;
using binary::kTrue;

void expect_masses(const MassDistribution& m, std::vector<double> expected, double tol = 1e-12) {
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(m.masses()[i], expected[i], tol) << i;
}

bool is_consonant_output(const MassDistribution& m) {
  return m[kEmpty] == 0.0 && (m[kTrue] == 0.0 || m[kFalse] == 0.0);
}

FilterState certain(ActionState target, const FilterConfig& config = {}) {
  auto s = FilterState::starting(config.model_for(target));
  s.prev_out = categorical(FrameOfDiscernment::binary(), singleton_of(target));
  return s;
}

template <typename T>
std::vector<T> events_of(const std::vector<FilterEvent>& log) {
  std::vector<T> out;
  for (const auto& e : log) {
    if (const auto* p = std::get_if<T>(&e)) out.push_back(*p);
  }
  return out;
}

TEST(ModelMass, Examples) {
  expect_masses(model_mass({ActionState::True, 0.9}), {0, 0.9, 0, 0.1});
  expect_masses(model_mass({ActionState::False, 1.0}), {0, 0, 1, 0}, 0.0);
  expect_masses(model_mass({ActionState::True, 0.0}), {0, 0, 0, 1}, 0.0);
}

TEST(Predict, Examples) {
  const EvolutionModel r{ActionState::True, 0.9};
  expect_masses(predict(make_binary(0, 0.8, 0, 0.2), r), {0, 0.72, 0, 0.28});
  const auto prev = make_binary(0, 0.35, 0, 0.65);
  EXPECT_EQ(predict(prev, {ActionState::True, 1.0}), prev);
  expect_masses(predict(prev, {ActionState::True, 0.0}), {0, 0, 0, 1}, 0.0);
}

TEST(Predict, RejectsInconsistentPrior) {
  try {
    predict(make_binary(0, 0.5, 0.5, 0), {ActionState::True, 0.9});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InconsistentPrior);
  }
  EXPECT_THROW(predict(make_binary(0.1, 0.4, 0, 0.5), {ActionState::True, 0.9}), Error);
}

TEST(Predict, MatchesClosedForm) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const auto target = i % 2 ? ActionState::True : ActionState::False;
    const std::size_t t = singleton_of(target);
    oracle::Binary prev{0, 0, 0, 0};
    prev[t] = u(rng);
    prev[oracle::kOmega] = 1.0 - prev[t];
    for (double gamma : {0.0, 0.3, 0.9, 1.0}) {
      const auto expected = oracle::closed_form_prediction(prev, t, gamma);
      const auto got = predict(MassDistribution::from_masses(FrameOfDiscernment::binary(), {prev.begin(), prev.end()}),
                               {target, gamma});
      expect_masses(got, {expected.begin(), expected.end()});
    }
  }
}

TEST(FilterConfig, Validation) {
  FilterConfig c;
  EXPECT_NO_THROW(c.validate());
  c.t_warn = 4.0;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.gamma_true = 1.1;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.lambda = -0.1;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.w_max = 0;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.t_stop = std::numeric_limits<double>::infinity();
  EXPECT_NO_THROW(c.validate());
}

TEST(Step, AgreementFusesPredictionAndMeasurement) {
  auto s = FilterState::starting({ActionState::True, 0.9});
  s.prev_out = make_binary(0, 0.8, 0, 0.2);
  TemporalFilter filter({}, s);
  const auto r = filter.step(make_binary(0, 0.6, 0, 0.4));
  EXPECT_NEAR(r.conflict, 0.0, 1e-15);
  expect_masses(r.output, {0, 0.888, 0, 0.112});
  EXPECT_TRUE(r.events.empty());
}

TEST(Step, ConflictKeepsPrediction) {
  auto s = FilterState::starting({ActionState::True, 0.9});
  s.prev_out = make_binary(0, 0.8, 0, 0.2);
  s.cusum = 0.1;
  TemporalFilter filter({}, s);
  const auto r = filter.step(make_binary(0, 0, 0.5, 0.5));
  EXPECT_NEAR(r.conflict, 0.36, 1e-12);
  EXPECT_NEAR(r.cusum, 0.1 * 0.9 + 0.36, 1e-12);
  expect_masses(r.output, {0, 0.72, 0, 0.28});
}

TEST(Step, RejectsConflictingMeasurement) {
  TemporalFilter filter({}, ActionState::True);
  try {
    filter.step(make_binary(0.2, 0.4, 0.2, 0.2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonNormalizedMeasurement);
  }
}

TEST(Step, HandTracedSwitch) {
  TemporalFilter filter({}, certain(ActionState::True));
  const auto contra = make_binary(0, 0, 1, 0);
  const double expected[] = {0.9, 1.62, 2.187, 2.6244, 2.95245, 3.18865};
  std::vector<FilterEvent> log;
  for (int k = 0; k < 6; ++k) {
    const auto r = filter.step(contra);
    EXPECT_NEAR(r.conflict, std::pow(0.9, k + 1), 1e-12);
    EXPECT_NEAR(r.cusum, expected[k], 1e-5) << k;
    EXPECT_NEAR(r.cusum, (k + 1) * std::pow(0.9, k + 1), 1e-9) << k;
    for (auto& e : r.events) log.push_back(e);
  }
  const auto warnings = events_of<events::Warning>(log);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_EQ(warnings[0].frame, 0u);
  const auto switches = events_of<events::ModelSwitch>(log);
  ASSERT_EQ(switches.size(), 1u);
  EXPECT_EQ(switches[0].stop_frame, 5u);
  EXPECT_EQ(switches[0].warn_frame, 0u);
  EXPECT_EQ(switches[0].new_target, ActionState::False);
  const auto it = events_of<events::TransitionInterval>(log);
  ASSERT_EQ(it.size(), 1u);
  EXPECT_EQ(it[0].start, 0u);
  EXPECT_EQ(it[0].end, 5u);

  EXPECT_EQ(filter.state().cusum, 0.0);
  EXPECT_EQ(filter.state().model.target, ActionState::False);
  const auto done = filter.take_finalized();
  ASSERT_EQ(done.size(), 6u);
  for (const auto& f : done) EXPECT_EQ(f.mass, vacuous(FrameOfDiscernment::binary()));
}

TEST(Step, IgnoranceUnderSustainedConflict) {
  FilterConfig c;
  c.t_stop = std::numeric_limits<double>::infinity();
  const double m0 = 0.8;
  auto s = FilterState::starting(c.model_for(ActionState::True));
  s.prev_out = make_binary(0, m0, 0, 1 - m0);
  TemporalFilter filter(c, s);
  for (int k = 1; k <= 50; ++k) {
    const auto r = filter.step(make_binary(0, 0, 1, 0));
    EXPECT_NEAR(r.output[kTrue], std::pow(0.9, k) * m0, 1e-12);
    EXPECT_TRUE(is_consonant_output(r.output));
  }
  EXPECT_LT(filter.state().prev_out[kTrue], 0.005);
}

TEST(Step, WarningClearsWhenConflictFades) {
  TemporalFilter filter({}, certain(ActionState::True));
  std::vector<FilterEvent> log;
  auto feed = [&](const MassDistribution& m) {
    for (auto& e : filter.step(m).events) log.push_back(e);
  };
  feed(make_binary(0, 0, 1, 0));  // cusum 0.9, warning
  EXPECT_EQ(filter.take_finalized().size(), 0u);
  for (int i = 0; i < 10; ++i) feed(make_binary(0, 1, 0, 0));
  const auto cleared = events_of<events::WarningCleared>(log);
  ASSERT_EQ(cleared.size(), 1u);
  // 0.9 · 0.9^k < 0.5 first at k = 6, i.e. frame 6.
  EXPECT_EQ(cleared[0].frame, 6u);
  EXPECT_TRUE(events_of<events::ModelSwitch>(log).empty());
  const auto done = filter.take_finalized();
  ASSERT_EQ(done.size(), 11u);
  for (std::size_t i = 0; i < done.size(); ++i) EXPECT_EQ(done[i].frame, i);
  EXPECT_NEAR(done[0].mass[kTrue], 0.9, 1e-12);
}

TEST(Step, FramesAfterTransitionAreRecomputed) {
  FilterConfig c;
  c.lambda = 1.0;
  c.gamma_true = c.gamma_false = 1.0;
  c.t_warn = 0.45;
  c.t_stop = 2.95;
  TemporalFilter filter(c, certain(ActionState::True, c));
  const auto meas = make_binary(0, 0, 0.1, 0.9);
  std::vector<FilterEvent> log;
  for (int f = 0; f < 30; ++f) {
    for (auto& e : filter.step(meas).events) log.push_back(e);
  }
  const auto sw = events_of<events::ModelSwitch>(log);
  ASSERT_EQ(sw.size(), 1u);
  EXPECT_EQ(sw[0].warn_frame, 4u);
  EXPECT_EQ(sw[0].stop_frame, 29u);
  const auto it = events_of<events::TransitionInterval>(log);
  ASSERT_EQ(it.size(), 1u);
  EXPECT_EQ(it[0].end, 9u);

  const auto done = filter.take_finalized();
  ASSERT_EQ(done.size(), 30u);
  for (std::size_t f = 0; f < 4; ++f) expect_masses(done[f].mass, {0, 1, 0, 0});
  for (std::size_t f = 4; f <= 9; ++f) expect_masses(done[f].mass, {0, 0, 0, 1}, 0.0);
  for (std::size_t f = 10; f < 30; ++f) {
    const double expected = 1.0 - std::pow(0.9, static_cast<double>(f - 9));
    expect_masses(done[f].mass, {0, 0, expected, 1 - expected});
  }
  EXPECT_NEAR(filter.state().prev_out[kFalse], 1.0 - std::pow(0.9, 20.0), 1e-12);
}

// With γ = 1 and a certain prior the prediction never moves, so a measurement
// [0, 0, e, 1 - e] injects exactly ε = e.
TEST(Step, CusumFollowsRecurrenceForInjectedConflict) {
  std::mt19937_64 rng(73);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    FilterConfig c;
    c.gamma_true = 1.0;
    c.lambda = u(rng);
    c.t_stop = std::numeric_limits<double>::infinity();
    TemporalFilter filter(c, certain(ActionState::True, c));
    double expected = 0.0;
    for (int f = 0; f < 100; ++f) {
      const double e = u(rng) < 0.2 ? 0.0 : u(rng);
      const auto r = filter.step(make_binary(0, 0, e, 1 - e));
      expected = expected * c.lambda + e;
      EXPECT_NEAR(r.conflict, e, 1e-15);
      EXPECT_NEAR(r.cusum, expected, 1e-12);
    }
  }
}

TEST(Step, UnitForgettingSwitchesOnThirdFullConflict) {
  FilterConfig c;
  c.lambda = 1.0;
  c.gamma_true = c.gamma_false = 1.0;
  TemporalFilter filter(c, certain(ActionState::True, c));
  const auto contra = make_binary(0, 0, 1, 0);
  EXPECT_EQ(filter.step(contra).cusum, 1.0);
  EXPECT_EQ(filter.step(contra).cusum, 2.0);
  const auto r = filter.step(contra);
  EXPECT_EQ(r.cusum, 3.0);
  ASSERT_EQ(events_of<events::ModelSwitch>(r.events).size(), 1u);
  EXPECT_EQ(events_of<events::ModelSwitch>(r.events)[0].stop_frame, 2u);
}

TEST(Step, BothThresholdsOnOneFrameGiveSingleFrameInterval) {
  FilterConfig c;
  c.t_warn = 0.5;
  c.t_stop = 0.8;
  TemporalFilter filter(c, certain(ActionState::True, c));
  const auto r = filter.step(make_binary(0, 0, 1, 0));
  const auto sw = events_of<events::ModelSwitch>(r.events);
  const auto it = events_of<events::TransitionInterval>(r.events);
  ASSERT_EQ(sw.size(), 1u);
  EXPECT_EQ(sw[0].warn_frame, 0u);
  EXPECT_EQ(sw[0].stop_frame, 0u);
  ASSERT_EQ(it.size(), 1u);
  EXPECT_EQ(it[0].start, 0u);
  EXPECT_EQ(it[0].end, 0u);
  EXPECT_TRUE(std::holds_alternative<events::Warning>(r.events.front()));
}

TEST(Step, FinishCommitsPendingOutputs) {
  TemporalFilter filter({}, certain(ActionState::True));
  filter.step(make_binary(0, 0, 1, 0));
  filter.step(make_binary(0, 0, 1, 0));
  EXPECT_EQ(filter.state().pending.size(), 2u);
  filter.finish();
  const auto done = filter.take_finalized();
  ASSERT_EQ(done.size(), 2u);
  EXPECT_NEAR(done[0].mass[kTrue], 0.9, 1e-12);
  EXPECT_NEAR(done[1].mass[kTrue], 0.81, 1e-12);
}

TEST(Initialize, Examples) {
  const FilterConfig c;
  const std::vector<MassDistribution> r(5, make_binary(0, 0.8, 0, 0.2));
  EXPECT_EQ(initialize(r, c).model.target, ActionState::True);
  const std::vector<MassDistribution> f(5, make_binary(0, 0, 0.8, 0.2));
  EXPECT_EQ(initialize(f, c).model.target, ActionState::False);
  const std::vector<MassDistribution> v(5, vacuous(FrameOfDiscernment::binary()));
  EXPECT_EQ(initialize(v, c).model.target, ActionState::False);
  const auto s = initialize(r, c);
  EXPECT_EQ(s.prev_out, vacuous(FrameOfDiscernment::binary()));
  EXPECT_EQ(s.cusum, 0.0);
  EXPECT_EQ(s.frame, 0u);
}

TEST(Initialize, ShortAndEmptyInput) {
  const FilterConfig c;
  const std::vector<MassDistribution> two(2, make_binary(0, 0.6, 0, 0.4));
  EXPECT_EQ(initialize(two, c).model.target, ActionState::True);
  try {
    initialize(std::vector<MassDistribution>{}, c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyInput);
  }
}

TEST(RunBatch, ZeroConflictStream) {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<MassDistribution> meas;
  for (int i = 0; i < 60; ++i) {
    const double r = u(rng);
    meas.push_back(make_binary(0, r, 0, 1 - r));
  }
  const auto out = run_batch(meas, {});
  EXPECT_EQ(out.initial_target, ActionState::True);
  EXPECT_TRUE(out.events.empty());
  auto prev = vacuous(FrameOfDiscernment::binary());
  for (std::size_t f = 0; f < meas.size(); ++f) {
    const auto pred = oracle::closed_form_prediction({0, prev[kTrue], 0, prev[kOmega]}, 1, 0.9);
    const auto fused = oracle::conjunctive({pred.begin(), pred.end()}, oracle::to_vector(meas[f]));
    expect_masses(out.outputs[f], fused);
    EXPECT_EQ(out.conflict[f], 0.0);
    prev = out.outputs[f];
  }
}

TEST(RunBatch, StreamEndingMidWarning) {
  std::vector<MassDistribution> meas(10, make_binary(0, 0.9, 0, 0.1));
  meas.push_back(make_binary(0, 0, 1, 0));
  const auto out = run_batch(meas, {});
  ASSERT_EQ(out.outputs.size(), 11u);
  ASSERT_EQ(out.events.size(), 1u);
  EXPECT_TRUE(std::holds_alternative<events::Warning>(out.events[0]));
  EXPECT_NEAR(out.outputs[10][kTrue], 0.9 * out.outputs[9][kTrue], 1e-12);
}

// Piecewise streams with bursts, checked against the offline reference.
std::vector<oracle::Binary> random_stream(std::mt19937_64& rng, std::size_t frames) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<oracle::Binary> out;
  bool state = u(rng) < 0.5;
  while (out.size() < frames) {
    const auto len = 5 + static_cast<std::size_t>(u(rng) * 40);
    for (std::size_t i = 0; i < len && out.size() < frames; ++i) {
      bool shown = state;
      if (u(rng) < 0.08) shown = !shown;
      const double strength = 0.5 + 0.5 * u(rng);
      const double leak = u(rng) < 0.2 ? 0.2 * u(rng) * (1 - strength) : 0.0;
      oracle::Binary m{0, 0, 0, 0};
      m[shown ? oracle::kR : oracle::kF] = strength;
      m[shown ? oracle::kF : oracle::kR] = leak;
      m[oracle::kOmega] = 1.0 - strength - leak;
      out.push_back(m);
    }
    state = !state;
  }
  return out;
}

TEST(Properties, MatchesOfflineReference) {
  std::mt19937_64 rng(53);
  std::size_t total_switches = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const auto stream = random_stream(rng, 300);
    oracle::ReferenceParams params;
    FilterConfig c;
    if (trial % 2) {
      params.lambda = c.lambda = 0.8;
      params.gamma_true = c.gamma_true = 0.95;
      params.t_stop = c.t_stop = 2.0;
      params.w_max = c.w_max = 3;
    }
    std::vector<MassDistribution> meas;
    for (const auto& m : stream) meas.push_back(MassDistribution::from_masses(FrameOfDiscernment::binary(), {m.begin(), m.end()}));
    const auto got = run_batch(meas, c);
    const auto ref = oracle::reference_filter(stream, params);

    EXPECT_EQ(singleton_of(got.initial_target), ref.initial_t);
    const auto sw = events_of<events::ModelSwitch>(got.events);
    const auto it = events_of<events::TransitionInterval>(got.events);
    ASSERT_EQ(sw.size(), ref.switch_frames.size()) << trial;
    total_switches += sw.size();
    for (std::size_t i = 0; i < sw.size(); ++i) {
      EXPECT_LE(it[i].end - it[i].start + 1, c.w_max + 1);
      EXPECT_EQ(sw[i].stop_frame, ref.switch_frames[i]);
      EXPECT_EQ(it[i].start, ref.intervals[i].first);
      EXPECT_EQ(it[i].end, ref.intervals[i].second);
    }
    for (std::size_t f = 0; f < stream.size(); ++f) {
      expect_masses(got.outputs[f], {ref.outputs[f].begin(), ref.outputs[f].end()}, 1e-9);
      EXPECT_NEAR(got.cusum[f], ref.cusum[f], 1e-9);
      EXPECT_TRUE(is_consonant_output(got.outputs[f])) << f;
    }
  }
  EXPECT_GT(total_switches, 20u);
}

TEST(Properties, IncrementalMatchesBatch) {
  std::mt19937_64 rng(59);
  const auto stream = random_stream(rng, 400);
  std::vector<MassDistribution> meas;
  for (const auto& m : stream) meas.push_back(MassDistribution::from_masses(FrameOfDiscernment::binary(), {m.begin(), m.end()}));
  const auto batch = run_batch(meas, {});

  TemporalFilter filter({}, initialize(meas, {}));
  std::vector<MassDistribution> outputs(meas.size(), vacuous(FrameOfDiscernment::binary()));
  std::size_t next = 0;
  for (const auto& m : meas) {
    filter.step(m);
    for (auto& f : filter.take_finalized()) {
      EXPECT_EQ(f.frame, next++);
      outputs[f.frame] = f.mass;
    }
  }
  filter.finish();
  for (auto& f : filter.take_finalized()) {
    EXPECT_EQ(f.frame, next++);
    outputs[f.frame] = f.mass;
  }
  EXPECT_EQ(next, meas.size());
  EXPECT_EQ(outputs, batch.outputs);
}

}  // namespace
