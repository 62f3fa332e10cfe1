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
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tbf/error.hpp"

/**
 * \file
 * \brief Unnormalized belief-function arithmetic on small finite frames.
 *
 * Subsets of a frame with n labels are addressed by n-bit masks: bit i is set
 * iff label i belongs to the subset. The empty set is mask 0 and the whole
 * frame is mask 2^n - 1. Masses are stored densely, indexed by mask.
 *
 * Mass on the empty set is allowed everywhere (open world): conjunctive
 * fusion of disagreeing sources puts their conflict there.
 */

namespace tbf {

using Subset = std::uint32_t;

inline constexpr std::size_t kMaxFrameSize = 16;

/// Construction tolerance on the sum of masses.
inline constexpr double kSumTolerance = 1e-9;

/// Dempster normalization refuses to rescale a conflict-free remainder
/// smaller than this.
inline constexpr double kNormalizeFloor = 1e-8;

/// Below this magnitude a combination residue is snapped to an exact zero.
inline constexpr double kZeroSnap = 1e-15;

/// Mask layout of the binary action frame {R, F}.
namespace binary {
inline constexpr Subset kEmpty = 0b00;
inline constexpr Subset kTrue = 0b01;
inline constexpr Subset kFalse = 0b10;
inline constexpr Subset kOmega = 0b11;
}  // namespace binary

class FrameOfDiscernment {
 public:
  explicit FrameOfDiscernment(std::vector<std::string> labels) {
    if (labels.empty() || labels.size() > kMaxFrameSize) {
      throw Error(ErrorCode::InvalidFrame, "frame needs between 1 and 16 labels, got " +
                                               std::to_string(labels.size()));
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i].empty()) {
        throw Error(ErrorCode::InvalidFrame, "empty label at position " + std::to_string(i));
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (labels[i] == labels[j]) {
          throw Error(ErrorCode::InvalidFrame, "duplicate label '" + labels[i] + "'");
        }
      }
    }
    labels_ = std::make_shared<const std::vector<std::string>>(std::move(labels));
  }

  /// The per-action frame {R, F} ("action true", "action false").
  static const FrameOfDiscernment& binary() {
    static const FrameOfDiscernment frame{{"R", "F"}};
    return frame;
  }

  [[nodiscard]] std::size_t size() const noexcept { return labels_->size(); }
  [[nodiscard]] std::size_t powerset_size() const noexcept { return std::size_t{1} << size(); }
  [[nodiscard]] Subset omega() const noexcept {
    return static_cast<Subset>(powerset_size() - 1);
  }
  [[nodiscard]] bool is_binary() const noexcept { return size() == 2; }
  [[nodiscard]] bool contains(Subset s) const noexcept { return s <= omega(); }

  [[nodiscard]] const std::vector<std::string>& labels() const noexcept { return *labels_; }
  [[nodiscard]] const std::string& label(std::size_t i) const { return labels_->at(i); }

  [[nodiscard]] std::optional<std::size_t> index_of(std::string_view name) const {
    for (std::size_t i = 0; i < size(); ++i) {
      if ((*labels_)[i] == name) return i;
    }
    return std::nullopt;
  }

  [[nodiscard]] Subset singleton(std::string_view name) const {
    auto i = index_of(name);
    if (!i) throw Error(ErrorCode::BadSubset, "unknown label '" + std::string(name) + "'");
    return Subset{1} << *i;
  }

  /// Renders a subset as `{a,b}`; the empty set is `{}`.
  [[nodiscard]] std::string format_subset(Subset s) const {
    if (!contains(s)) throw Error(ErrorCode::BadSubset, "mask out of range");
    std::string out = "{";
    bool first = true;
    for (std::size_t i = 0; i < size(); ++i) {
      if (s & (Subset{1} << i)) {
        if (!first) out += ',';
        out += (*labels_)[i];
        first = false;
      }
    }
    out += '}';
    return out;
  }

  /// Inverse of format_subset. Braces are optional; labels are comma separated.
  [[nodiscard]] Subset parse_subset(std::string_view text) const {
    auto trim = [](std::string_view v) {
      while (!v.empty() && v.front() == ' ') v.remove_prefix(1);
      while (!v.empty() && v.back() == ' ') v.remove_suffix(1);
      return v;
    };
    text = trim(text);
    if (text.size() >= 2 && text.front() == '{' && text.back() == '}') {
      text = trim(text.substr(1, text.size() - 2));
    }
    Subset s = 0;
    while (!text.empty()) {
      const auto comma = text.find(',');
      const auto token = trim(text.substr(0, comma));
      s |= singleton(token);
      if (comma == std::string_view::npos) break;
      text.remove_prefix(comma + 1);
    }
    return s;
  }

  friend bool operator==(const FrameOfDiscernment& a, const FrameOfDiscernment& b) {
    return a.labels_ == b.labels_ || *a.labels_ == *b.labels_;
  }

 private:
  std::shared_ptr<const std::vector<std::string>> labels_;
};

namespace detail {
/// Tag for constructing a distribution from masses already known to be valid.
struct Trusted {};
}  // namespace detail

class MassDistribution {
 public:
  /// Validating constructor from a dense vector indexed by subset mask.
  static MassDistribution from_masses(FrameOfDiscernment frame, std::vector<double> masses) {
    if (masses.size() != frame.powerset_size()) {
      throw Error(ErrorCode::BadSubset, "expected " + std::to_string(frame.powerset_size()) +
                                            " masses, got " + std::to_string(masses.size()));
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < masses.size(); ++i) {
      if (!std::isfinite(masses[i])) {
        throw Error(ErrorCode::NonFiniteInput, "mass " + frame.format_subset(static_cast<Subset>(i)));
      }
      if (masses[i] < 0.0) {
        throw Error(ErrorCode::NegativeMass, "mass on " + frame.format_subset(static_cast<Subset>(i)) +
                                                 " is " + std::to_string(masses[i]));
      }
      sum += masses[i];
    }
    if (std::abs(sum - 1.0) > kSumTolerance) {
      throw Error(ErrorCode::NotNormalized, "masses sum to " + std::to_string(sum));
    }
    return MassDistribution{std::move(frame), std::move(masses), detail::Trusted{}};
  }

  MassDistribution(FrameOfDiscernment frame, std::vector<double> masses, detail::Trusted)
      : frame_(std::move(frame)), masses_(std::move(masses)) {}

  [[nodiscard]] const FrameOfDiscernment& frame() const noexcept { return frame_; }
  [[nodiscard]] std::span<const double> masses() const noexcept { return masses_; }
  [[nodiscard]] double operator[](Subset s) const { return masses_.at(s); }

  [[nodiscard]] double total() const noexcept {
    double sum = 0.0;
    for (double m : masses_) sum += m;
    return sum;
  }

  /// No mass on the empty set.
  [[nodiscard]] bool is_normalized() const noexcept { return masses_[0] == 0.0; }

  /// Binary frame only: conflict-free with at most one nonzero singleton.
  [[nodiscard]] bool is_consonant_binary() const noexcept {
    return frame_.is_binary() && masses_[binary::kEmpty] == 0.0 &&
           (masses_[binary::kTrue] == 0.0 || masses_[binary::kFalse] == 0.0);
  }

  [[nodiscard]] std::vector<Subset> focal_elements() const {
    std::vector<Subset> out;
    for (std::size_t i = 0; i < masses_.size(); ++i) {
      if (masses_[i] != 0.0) out.push_back(static_cast<Subset>(i));
    }
    return out;
  }

  friend bool operator==(const MassDistribution& a, const MassDistribution& b) {
    return a.frame_ == b.frame_ && a.masses_ == b.masses_;
  }

 private:
  FrameOfDiscernment frame_;
  std::vector<double> masses_;
};

/// Builds a distribution from sparse assignments; unassigned subsets get 0.
inline MassDistribution make_mass(const FrameOfDiscernment& frame,
                                  const std::map<Subset, double>& assignments) {
  std::vector<double> masses(frame.powerset_size(), 0.0);
  for (const auto& [subset, value] : assignments) {
    if (!frame.contains(subset)) {
      throw Error(ErrorCode::BadSubset, "mask " + std::to_string(subset) + " outside frame");
    }
    masses[subset] = value;
  }
  return MassDistribution::from_masses(frame, std::move(masses));
}

/// `[m(∅), m(R), m(F), m(Ω)]` on the binary frame.
inline MassDistribution make_binary(double empty, double r, double f, double omega) {
  return MassDistribution::from_masses(FrameOfDiscernment::binary(), {empty, r, f, omega});
}

inline MassDistribution vacuous(const FrameOfDiscernment& frame) {
  std::vector<double> masses(frame.powerset_size(), 0.0);
  masses[frame.omega()] = 1.0;
  return {frame, std::move(masses), detail::Trusted{}};
}

/// All mass on a single subset.
inline MassDistribution categorical(const FrameOfDiscernment& frame, Subset focal) {
  if (!frame.contains(focal)) throw Error(ErrorCode::BadSubset, "mask outside frame");
  std::vector<double> masses(frame.powerset_size(), 0.0);
  masses[focal] = 1.0;
  return {frame, std::move(masses), detail::Trusted{}};
}

namespace detail {

inline void require_same_frame(const MassDistribution& a, const MassDistribution& b) {
  if (!(a.frame() == b.frame())) {
    throw Error(ErrorCode::FrameMismatch, "operands are defined on different frames");
  }
}

inline void snap_zeros(std::vector<double>& v) {
  for (double& x : v) {
    if (std::abs(x) < kZeroSnap) x = 0.0;
  }
}

// Commonality q(A) = sum of m(B) over B ⊇ A, in place (superset zeta transform).
inline void to_commonality(std::vector<double>& v, std::size_t n) {
  for (std::size_t bit = 0; bit < n; ++bit) {
    const std::size_t b = std::size_t{1} << bit;
    for (std::size_t s = 0; s < v.size(); ++s) {
      if (!(s & b)) v[s] += v[s | b];
    }
  }
}

inline void from_commonality(std::vector<double>& v, std::size_t n) {
  for (std::size_t bit = 0; bit < n; ++bit) {
    const std::size_t b = std::size_t{1} << bit;
    for (std::size_t s = 0; s < v.size(); ++s) {
      if (!(s & b)) v[s] -= v[s | b];
    }
  }
}

// Implicability b(A) = sum of m(B) over B ⊆ A, in place (subset zeta transform).
inline void to_implicability(std::vector<double>& v, std::size_t n) {
  for (std::size_t bit = 0; bit < n; ++bit) {
    const std::size_t b = std::size_t{1} << bit;
    for (std::size_t s = 0; s < v.size(); ++s) {
      if (s & b) v[s] += v[s ^ b];
    }
  }
}

inline void from_implicability(std::vector<double>& v, std::size_t n) {
  for (std::size_t bit = 0; bit < n; ++bit) {
    const std::size_t b = std::size_t{1} << bit;
    for (std::size_t s = 0; s < v.size(); ++s) {
      if (s & b) v[s] -= v[s ^ b];
    }
  }
}

}  // namespace detail

/// Unnormalized conjunctive rule: result(E) = Σ_{C∩D=E} m1(C)·m2(D).
///
/// Computed in the commonality domain, where the rule is a pointwise product.
inline MassDistribution combine_conjunctive(const MassDistribution& m1, const MassDistribution& m2) {
  detail::require_same_frame(m1, m2);
  const std::size_t n = m1.frame().size();
  std::vector<double> q1(m1.masses().begin(), m1.masses().end());
  std::vector<double> q2(m2.masses().begin(), m2.masses().end());
  detail::to_commonality(q1, n);
  detail::to_commonality(q2, n);
  for (std::size_t i = 0; i < q1.size(); ++i) q1[i] *= q2[i];
  detail::from_commonality(q1, n);
  detail::snap_zeros(q1);
  return {m1.frame(), std::move(q1), detail::Trusted{}};
}

/// Disjunctive rule: result(E) = Σ_{C∪D=E} m1(C)·m2(D).
///
/// Computed in the implicability domain, where the rule is a pointwise product.
inline MassDistribution combine_disjunctive(const MassDistribution& m1, const MassDistribution& m2) {
  detail::require_same_frame(m1, m2);
  const std::size_t n = m1.frame().size();
  std::vector<double> b1(m1.masses().begin(), m1.masses().end());
  std::vector<double> b2(m2.masses().begin(), m2.masses().end());
  detail::to_implicability(b1, n);
  detail::to_implicability(b2, n);
  for (std::size_t i = 0; i < b1.size(); ++i) b1[i] *= b2[i];
  detail::from_implicability(b1, n);
  detail::snap_zeros(b1);
  return {m1.frame(), std::move(b1), detail::Trusted{}};
}

/// Reliability discounting: every proper subset keeps alpha of its mass, the
/// remainder moves to the whole frame.
inline MassDistribution discount(const MassDistribution& m, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::AlphaOutOfRange, "alpha = " + std::to_string(alpha));
  }
  const Subset omega = m.frame().omega();
  std::vector<double> out(m.masses().size());
  for (Subset s = 0; s < omega; ++s) out[s] = alpha * m[s];
  out[omega] = (1.0 - alpha) + alpha * m[omega];
  return {m.frame(), std::move(out), detail::Trusted{}};
}

inline double conflict_mass(const MassDistribution& m) noexcept { return m.masses()[0]; }

/// Pignistic probability of each label: every subset's mass is shared equally
/// among its members, then renormalized by 1 - m(∅).
inline std::vector<double> pignistic(const MassDistribution& m) {
  const double empty = conflict_mass(m);
  if (empty >= 1.0 - 1e-12) {
    throw Error(ErrorCode::TotalConflict, "pignistic transform undefined for m(empty) = " +
                                              std::to_string(empty));
  }
  const std::size_t n = m.frame().size();
  std::vector<double> betp(n, 0.0);
  for (Subset s = 1; s <= m.frame().omega(); ++s) {
    const double mass = m[s];
    if (mass == 0.0) continue;
    const double share = mass / static_cast<double>(std::popcount(s));
    for (std::size_t i = 0; i < n; ++i) {
      if (s & (Subset{1} << i)) betp[i] += share;
    }
  }
  for (double& p : betp) p /= (1.0 - empty);
  return betp;
}

/// Dempster normalization: drop the conflict and rescale the rest.
inline MassDistribution dempster_normalize(const MassDistribution& m) {
  const double empty = conflict_mass(m);
  if (1.0 - empty <= kNormalizeFloor) {
    throw Error(ErrorCode::TotalConflict, "cannot normalize m(empty) = " + std::to_string(empty));
  }
  if (empty == 0.0) return m;
  std::vector<double> out(m.masses().begin(), m.masses().end());
  out[0] = 0.0;
  for (std::size_t i = 1; i < out.size(); ++i) out[i] /= (1.0 - empty);
  return {m.frame(), std::move(out), detail::Trusted{}};
}

}  // namespace tbf
