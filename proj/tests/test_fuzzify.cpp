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

#include "tbf/fuzzify.hpp"

namespace {

using namespace tbf;

// mu_true rises on [0.2, 0.4] and stays up; mu_false is up until 0.1 and
// falls to zero at 0.3.
FuzzyPartition stride_partition() {
  return make_partition({0.2, 0.4, std::nullopt, std::nullopt}, {std::nullopt, std::nullopt, 0.1, 0.3},
                        -1.0, 2.0);
}

// Reference membership written directly from the piecewise definition.
double trapezoid_reference(double x, double a, double b, double c, double d) {
  if (x <= a || x >= d) return 0.0;
  if (x < b) return (x - a) / (b - a);
  if (x <= c) return 1.0;
  return (d - x) / (d - c);
}

TEST(Trapezoid, MatchesPiecewiseDefinition) {
  const Trapezoid t{1.0, 2.0, 4.0, 7.0};
  for (double x = 0.0; x <= 8.0; x += 0.125) {
    EXPECT_DOUBLE_EQ(t(x), trapezoid_reference(x, 1.0, 2.0, 4.0, 7.0)) << x;
  }
}

TEST(Trapezoid, OpenPlateaus) {
  const Trapezoid right_open{0.0, 1.0, std::nullopt, std::nullopt};
  EXPECT_EQ(right_open(1e9), 1.0);
  EXPECT_EQ(right_open(-1.0), 0.0);
  const Trapezoid left_open{std::nullopt, std::nullopt, 0.0, 1.0};
  EXPECT_EQ(left_open(-1e9), 1.0);
  EXPECT_EQ(left_open(2.0), 0.0);
  const Trapezoid everywhere{};
  EXPECT_EQ(everywhere(123.0), 1.0);
}

TEST(Trapezoid, RejectsBadKnots) {
  const Trapezoid unsorted{0.5, 0.2, std::nullopt, std::nullopt};
  EXPECT_THROW(unsorted.validate(), Error);
  const Trapezoid half_open{0.5, std::nullopt, std::nullopt, std::nullopt};
  EXPECT_THROW(half_open.validate(), Error);
  const Trapezoid nan_knot{std::nan(""), 1.0, std::nullopt, std::nullopt};
  EXPECT_THROW(nan_knot.validate(), Error);
}

TEST(FuzzifyValue, Examples) {
  const auto p = stride_partition();
  const auto mid = fuzzify_value(0.3, p);
  EXPECT_NEAR(mid[binary::kTrue], 0.5, 1e-12);
  EXPECT_NEAR(mid[binary::kFalse], 0.0, 1e-12);
  EXPECT_NEAR(mid[binary::kOmega], 0.5, 1e-12);

  const auto low = fuzzify_value(0.0, p);
  EXPECT_EQ(low.masses()[0], 0.0);
  EXPECT_EQ(low[binary::kFalse], 1.0);
  EXPECT_EQ(low[binary::kOmega], 0.0);

  const auto high = fuzzify_value(0.7, p);
  EXPECT_EQ(high[binary::kTrue], 1.0);
  EXPECT_EQ(high[binary::kOmega], 0.0);
}

TEST(FuzzifyValue, NonFinite) {
  const auto p = stride_partition();
  try {
    fuzzify_value(std::numeric_limits<double>::quiet_NaN(), p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFiniteInput);
  }
  EXPECT_THROW(fuzzify_value(std::numeric_limits<double>::infinity(), p), Error);
}

TEST(ValidatePartition, Examples) {
  const FuzzyPartition disjoint{{0.6, 0.8, std::nullopt, std::nullopt},
                                {std::nullopt, std::nullopt, 0.1, 0.3}, 0.0, 1.0};
  EXPECT_TRUE(validate_partition(disjoint).ok);

  const FuzzyPartition identical{{}, {}, 0.0, 1.0};
  const auto bad = validate_partition(identical);
  EXPECT_FALSE(bad.ok);
  EXPECT_NEAR(bad.worst_doubt, -1.0, 1e-12);

  // Slopes cross at 0.25 where both memberships are 0.25.
  const FuzzyPartition slopes{{0.2, 0.4, std::nullopt, std::nullopt},
                              {std::nullopt, std::nullopt, 0.1, 0.3}, 0.0, 1.0};
  EXPECT_TRUE(validate_partition(slopes).ok);

  // Plateaus meet: mu_true is 1 from 0.3 while mu_false is still positive.
  const FuzzyPartition overlapping{{0.1, 0.3, std::nullopt, std::nullopt},
                                   {std::nullopt, std::nullopt, 0.2, 0.5}, 0.0, 1.0};
  const auto r = validate_partition(overlapping);
  EXPECT_FALSE(r.ok);
  EXPECT_GE(r.worst_x, 0.1);
  EXPECT_LE(r.worst_x, 0.5);
  EXPECT_THROW(make_partition(overlapping.mu_true, overlapping.mu_false, 0.0, 1.0), Error);
}

TEST(Properties, FuzzifiedMassesAreNormalizedAndConflictFree) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(-2.0, 3.0);
  const auto p = stride_partition();
  for (int i = 0; i < 2000; ++i) {
    const double x = u(rng);
    const auto m = fuzzify_value(x, p);
    EXPECT_EQ(m[binary::kEmpty], 0.0);
    EXPECT_NEAR(m.total(), 1.0, 1e-12);
    for (double v : m.masses()) EXPECT_GE(v, 0.0);
    EXPECT_DOUBLE_EQ(m[binary::kTrue], p.mu_true(x));
  }
}

TEST(Properties, RandomNonOverlappingPartitionsPass) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    // mu_false falls on [c, d], mu_true rises on [a, b] with a >= c and b >= d:
    // the two slopes never sum above one.
    double c = u(rng), d = c + u(rng);
    double a = c + u(rng) * (d - c), b = d + u(rng);
    const FuzzyPartition p{{a, b, std::nullopt, std::nullopt}, {std::nullopt, std::nullopt, c, d},
                           c - 1.0, b + 1.0};
    EXPECT_TRUE(validate_partition(p).ok) << a << " " << b << " " << c << " " << d;
  }
}

}  // namespace
