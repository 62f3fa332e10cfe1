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

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "tbf/eval.hpp"
#include "tbf/io.hpp"

namespace tbf {

/// A run of frames whose evidence points at the opposite of the true state.
struct FalseAlarm {
  std::size_t frame = 0;
  std::size_t duration = 1;
  double intensity = 1.0;  // share of the evidence moved to the wrong state
};

struct SyntheticAction {
  std::vector<Segment> segments;
  std::vector<FalseAlarm> false_alarms;
};

/// Labeled synthetic mass streams. Inside a truth segment the evidence is
/// m(R) = 1 - noise·u - doubt_floor with u ~ U[0, 1) and the rest on Ω;
/// outside, the same on F. A false alarm moves `intensity` of the singleton
/// mass to the opposite state for its duration.
struct SyntheticSpec {
  std::uint64_t seed = 42;
  std::size_t frames = 500;
  double noise = 0.1;
  double doubt_floor = 0.0;
  std::map<std::string, SyntheticAction> actions;

  void validate() const {
    auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!unit(noise) || !unit(doubt_floor) || noise + doubt_floor > 1.0) {
      throw Error(ErrorCode::ConfigError, "synthetic: noise and doubt_floor must lie in [0, 1] with sum <= 1");
    }
    if (frames == 0) throw Error(ErrorCode::ConfigError, "synthetic: frames must be positive");
    for (const auto& [name, a] : actions) {
      SegmentAnnotation{name, a.segments}.validate();
      if (!a.segments.empty() && a.segments.back().end >= frames) {
        throw Error(ErrorCode::ConfigError, "synthetic: segment of '" + name + "' past the last frame");
      }
      for (const auto& fa : a.false_alarms) {
        if (fa.duration == 0 || fa.frame + fa.duration > frames || !unit(fa.intensity)) {
          throw Error(ErrorCode::ConfigError, "synthetic: invalid false alarm for '" + name + "'");
        }
      }
    }
  }
};

struct SyntheticData {
  std::size_t frames = 0;
  io::MassTrace masses;
  std::map<std::string, SegmentAnnotation> truth;
};

inline SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  // 53 random bits, independent of the standard library's distributions.
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

  SyntheticData out;
  out.frames = spec.frames;
  for (const auto& [name, action] : spec.actions) {
    SegmentAnnotation truth{name, action.segments};
    std::vector<double> alarm(spec.frames, 0.0);
    for (const auto& fa : action.false_alarms) {
      for (std::size_t f = fa.frame; f < fa.frame + fa.duration; ++f) alarm[f] = fa.intensity;
    }
    auto& stream = out.masses[name];
    stream.reserve(spec.frames);
    for (std::size_t f = 0; f < spec.frames; ++f) {
      const double strength = std::max(0.0, 1.0 - spec.noise * uniform() - spec.doubt_floor);
      const Subset own = truth.contains(f) ? binary::kTrue : binary::kFalse;
      const Subset other = own ^ binary::kOmega;
      std::vector<double> m(4, 0.0);
      m[own] = (1.0 - alarm[f]) * strength;
      m[other] = alarm[f] * strength;
      m[binary::kOmega] = 1.0 - strength;
      stream.emplace_back(FrameOfDiscernment::binary(), std::move(m), detail::Trusted{});
    }
    out.truth.emplace(name, std::move(truth));
  }
  return out;
}

}  // namespace tbf
