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
#include <optional>
#include <string>
#include <vector>

#include "tbf/belief.hpp"

namespace tbf {

/// Trapezoidal membership: 0 below a, rising to 1 on [b, c], falling to 0 at d.
///
/// A missing (a, b) pair makes the left plateau extend to -inf; a missing
/// (c, d) pair makes the right plateau extend to +inf.
struct Trapezoid {
  std::optional<double> a, b, c, d;

  void validate() const {
    if (a.has_value() != b.has_value() || c.has_value() != d.has_value()) {
      throw Error(ErrorCode::InvalidPartition,
                  "open plateaus need both knots of a side set to null");
    }
    std::vector<double> knots;
    for (const auto& k : {a, b, c, d}) {
      if (!k) continue;
      if (!std::isfinite(*k)) throw Error(ErrorCode::InvalidPartition, "non-finite knot");
      knots.push_back(*k);
    }
    if (!std::is_sorted(knots.begin(), knots.end())) {
      throw Error(ErrorCode::InvalidPartition, "knots must satisfy a <= b <= c <= d");
    }
  }

  [[nodiscard]] double operator()(double x) const noexcept {
    if (a) {
      if (x <= *a) return 0.0;
      if (x < *b) return (x - *a) / (*b - *a);
    }
    if (c) {
      if (x <= *c) return 1.0;
      if (x >= *d) return 0.0;
      return (*d - x) / (*d - *c);
    }
    return 1.0;
  }

  [[nodiscard]] std::vector<double> finite_knots() const {
    std::vector<double> out;
    for (const auto& k : {a, b, c, d}) {
      if (k) out.push_back(*k);
    }
    return out;
  }
};

/// Outcome of validate_partition. `worst_x` minimizes the doubt 1 - μT - μF.
struct PartitionCheck {
  bool ok = true;
  double worst_x = 0.0;
  double worst_doubt = 1.0;
};

/// Membership pair for one parameter, with the input range it is declared on.
struct FuzzyPartition {
  Trapezoid mu_true;
  Trapezoid mu_false;
  double range_lo = 0.0;
  double range_hi = 1.0;
};

/// Scans knots plus a 1e-3 grid over the declared range for points where the
/// two memberships sum above one.
inline PartitionCheck validate_partition(const FuzzyPartition& p) {
  constexpr double kStep = 1e-3;
  constexpr double kSlack = 1e-9;
  PartitionCheck check;
  auto probe = [&](double x) {
    if (x < p.range_lo || x > p.range_hi) return;
    const double doubt = 1.0 - p.mu_true(x) - p.mu_false(x);
    if (doubt < check.worst_doubt) {
      check.worst_doubt = doubt;
      check.worst_x = x;
    }
  };
  // Sums of piecewise-linear functions peak at knots, so knots settle it exactly.
  for (double k : p.mu_true.finite_knots()) probe(k);
  for (double k : p.mu_false.finite_knots()) probe(k);
  probe(p.range_lo);
  probe(p.range_hi);
  const auto steps = static_cast<long long>(std::floor((p.range_hi - p.range_lo) / kStep));
  for (long long i = 0; i <= steps; ++i) probe(p.range_lo + static_cast<double>(i) * kStep);
  check.ok = check.worst_doubt >= -kSlack;
  return check;
}

/// Validates knots and overlap, returning the partition unchanged on success.
inline FuzzyPartition make_partition(Trapezoid mu_true, Trapezoid mu_false, double range_lo,
                                     double range_hi) {
  mu_true.validate();
  mu_false.validate();
  if (!(std::isfinite(range_lo) && std::isfinite(range_hi) && range_lo <= range_hi)) {
    throw Error(ErrorCode::InvalidPartition, "input range must be finite with lo <= hi");
  }
  FuzzyPartition p{mu_true, mu_false, range_lo, range_hi};
  if (const auto check = validate_partition(p); !check.ok) {
    throw Error(ErrorCode::PartitionOverlap,
                "memberships sum to " + std::to_string(1.0 - check.worst_doubt) + " at x = " +
                    std::to_string(check.worst_x));
  }
  return p;
}

/// Lifts a numeric parameter value to a mass on the binary action frame:
/// m(R) = μT(x), m(F) = μF(x), doubt takes the rest.
inline MassDistribution fuzzify_value(double x, const FuzzyPartition& p,
                                      const FrameOfDiscernment& frame = FrameOfDiscernment::binary()) {
  if (!frame.is_binary()) throw Error(ErrorCode::FrameMismatch, "fuzzify needs a binary frame");
  if (!std::isfinite(x)) throw Error(ErrorCode::NonFiniteInput, "parameter value is not finite");
  const double r = p.mu_true(x);
  double f = p.mu_false(x);
  double omega = 1.0 - r - f;
  if (omega < -1e-9) {
    throw Error(ErrorCode::PartitionOverlap, "memberships sum to " + std::to_string(r + f) +
                                                 " at x = " + std::to_string(x));
  }
  if (omega < 0.0) {
    omega = 0.0;
    f = 1.0 - r;
  }
  return {frame, {0.0, r, f, omega}, detail::Trusted{}};
}

}  // namespace tbf
