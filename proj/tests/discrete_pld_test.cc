// Copyright 2025 The pld-accounting Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <limits>

#include "gtest/gtest.h"
#include "pld/discrete_pld.hpp"
#include "pld/hockey_stick.hpp"
#include "pld/stoch_dom.hpp"

namespace pld {
namespace {

const double kLn3 = std::log(3.0);

DiscretePld randomized_response_pld() {
  return DiscretePld({-kLn3, kLn3}, {0.25, 0.75}, 0.0, 0.0);
}

TEST(DiscretePld, ValidatesInvariants) {
  EXPECT_NO_THROW(DiscretePld({0.0, 1.0}, {0.5, 0.5}, 0.0, 0.0));
  // Not strictly increasing.
  EXPECT_THROW(DiscretePld({1.0, 1.0}, {0.5, 0.5}, 0.0, 0.0),
               InvalidArgumentError);
  // Mass does not sum to one.
  EXPECT_THROW(DiscretePld({0.0}, {0.9}, 0.0, 0.0), InvalidArgumentError);
  // Non-finite value.
  EXPECT_THROW(
      DiscretePld({std::numeric_limits<double>::infinity()}, {1.0}, 0.0, 0.0),
      InvalidArgumentError);
  // Materially negative mass.
  EXPECT_THROW(DiscretePld({0.0, 1.0}, {1.1, -0.1}, 0.0, 0.0),
               InvalidArgumentError);
  // Tiny negative mass from rounding is clamped.
  DiscretePld ok({0.0, 1.0}, {1.0, -1e-15}, 0.0, 1e-15);
  EXPECT_EQ(ok.probs()[1], 0.0);
}

TEST(DiscretePld, FromAtomsSortsAndMerges) {
  DiscretePld pld = DiscretePld::from_atoms(
      {{1.0, 0.25}, {-1.0, 0.25}, {1.0, 0.25}, {0.0, 0.25}}, 0.0, 0.0);
  EXPECT_EQ(pld.size(), 3u);
  EXPECT_DOUBLE_EQ(pld.values()[0], -1.0);
  EXPECT_DOUBLE_EQ(pld.probs()[2], 0.5);
}

TEST(DiscretePld, RealizationPredicate) {
  EXPECT_TRUE(randomized_response_pld().is_realization());
  EXPECT_TRUE(DiscretePld::point_mass(0.0).is_realization());
  // Mass at -inf disqualifies.
  EXPECT_FALSE(DiscretePld({0.0}, {0.9}, 0.1, 0.0).is_realization());
  // E[e^-L] > 1 disqualifies.
  EXPECT_FALSE(DiscretePld({-1.0}, {1.0}, 0.0, 0.0).is_realization());
}

TEST(HockeyStick, RandomizedResponseAtZero) {
  EXPECT_NEAR(hockey_stick_delta(randomized_response_pld(), 0.0), 0.5, 1e-15);
}

TEST(HockeyStick, ZeroAtMaxLoss) {
  EXPECT_DOUBLE_EQ(hockey_stick_delta(randomized_response_pld(), kLn3), 0.0);
}

TEST(HockeyStick, MonotoneAndBounded) {
  DiscretePld pld({-0.5, 0.3, 2.0}, {0.2, 0.5, 0.25}, 0.01, 0.04);
  double prev = 1.0;
  for (double eps = -4.0; eps <= 4.0; eps += 0.125) {
    double d = hockey_stick_delta(pld, eps);
    EXPECT_LE(d, prev + 1e-15);
    EXPECT_GE(d, pld.p_top());
    EXPECT_LE(d, 1.0 - pld.p_bottom() + 1e-15);
    prev = d;
  }
}

TEST(HockeyStick, InfiniteAtomContributions) {
  DiscretePld pld({1.0}, {0.5}, 0.2, 0.3);
  // -inf atom contributes nothing, +inf atom its full mass.
  EXPECT_NEAR(hockey_stick_delta(pld, 5.0), 0.3, 1e-15);
  EXPECT_NEAR(hockey_stick_delta(pld, -40.0), 0.8, 1e-12);
}

TEST(EpsilonForDelta, PointMassAtOne) {
  EXPECT_NEAR(epsilon_for_delta(DiscretePld::point_mass(1.0), 0.0), 1.0,
              1e-11);
}

TEST(EpsilonForDelta, InvertsRandomizedResponse) {
  EXPECT_NEAR(epsilon_for_delta(randomized_response_pld(), 0.5), 0.0, 1e-11);
}

TEST(EpsilonForDelta, DeltaBelowTopMassThrows) {
  DiscretePld pld({0.0}, {1.0 - 1e-3}, 0.0, 1e-3);
  EXPECT_THROW(epsilon_for_delta(pld, 1e-4), OutOfRangeError);
}

TEST(EpsilonForDelta, DeltaAboveReachThrows) {
  DiscretePld pld({0.0}, {0.9}, 0.1, 0.0);
  EXPECT_THROW(epsilon_for_delta(pld, 0.95), OutOfRangeError);
}

TEST(EpsilonForDelta, RoundTripsWithHockeyStick) {
  DiscretePld pld({-1.0, 0.25, 1.5, 3.0}, {0.3, 0.4, 0.2, 0.1}, 0.0, 0.0);
  for (double eps : {-0.5, 0.1, 0.9, 2.0}) {
    double delta = hockey_stick_delta(pld, eps);
    double eps_back = epsilon_for_delta(pld, delta);
    // Smallest epsilon reaching delta can only be at or below eps.
    EXPECT_LE(eps_back, eps + 1e-10);
    EXPECT_NEAR(hockey_stick_delta(pld, eps_back), delta, 1e-10);
  }
}

TEST(NegExpMoment, RandomizedResponseIsOne) {
  EXPECT_NEAR(neg_exp_moment(randomized_response_pld()), 1.0, 1e-15);
}

TEST(NegExpMoment, PointMasses) {
  EXPECT_DOUBLE_EQ(neg_exp_moment(DiscretePld::point_mass(0.0)), 1.0);
  EXPECT_NEAR(neg_exp_moment(DiscretePld::point_mass(std::log(2.0))), 0.5,
              1e-15);
}

TEST(NegExpMoment, RejectsBottomMass) {
  DiscretePld pld({0.0}, {0.9}, 0.1, 0.0);
  EXPECT_THROW(neg_exp_moment(pld), InvalidRealizationError);
}

TEST(PldDual, PointMass) {
  double eps = 0.7;
  DiscretePld dual = pld_dual(DiscretePld::point_mass(eps));
  ASSERT_EQ(dual.size(), 1u);
  EXPECT_DOUBLE_EQ(dual.values()[0], -eps);
  EXPECT_NEAR(dual.probs()[0], std::exp(-eps), 1e-15);
  EXPECT_NEAR(dual.p_top(), 1.0 - std::exp(-eps), 1e-15);
}

TEST(PldDual, RandomizedResponseIsSelfDual) {
  DiscretePld rr = randomized_response_pld();
  DiscretePld dual = pld_dual(rr);
  ASSERT_EQ(dual.size(), 2u);
  EXPECT_NEAR(dual.values()[0], -kLn3, 1e-15);
  EXPECT_NEAR(dual.probs()[0], 0.25, 1e-15);
  EXPECT_NEAR(dual.probs()[1], 0.75, 1e-15);
  EXPECT_NEAR(dual.p_top(), 0.0, 1e-15);
}

TEST(PldDual, InvolutionOnFullSupport) {
  DiscretePld rr = randomized_response_pld();
  DiscretePld twice = pld_dual(pld_dual(rr));
  ASSERT_EQ(twice.size(), rr.size());
  for (size_t i = 0; i < rr.size(); ++i) {
    EXPECT_NEAR(twice.values()[i], rr.values()[i], 1e-14);
    EXPECT_NEAR(twice.probs()[i], rr.probs()[i], 1e-14);
  }
}

TEST(PldDual, OutputIsRealization) {
  DiscretePld pld({-0.2, 0.4, 1.7}, {0.2, 0.5, 0.3}, 0.0, 0.0);
  EXPECT_TRUE(pld_dual(pld).is_realization());
}

TEST(PldDual, RejectsNonRealization) {
  DiscretePld pld({0.0}, {0.9}, 0.1, 0.0);
  EXPECT_THROW(pld_dual(pld), InvalidRealizationError);
}

TEST(CheckStochDom, PointMasses) {
  DiscretePld p0 = DiscretePld::point_mass(0.0);
  DiscretePld p1 = DiscretePld::point_mass(1.0);
  EXPECT_TRUE(check_stoch_dom(p0, p1, TightnessParams(0.0, 0.0)));
  EXPECT_FALSE(check_stoch_dom(p1, p0, TightnessParams(0.0, 0.0)));
  EXPECT_TRUE(check_stoch_dom(p1, p0, TightnessParams(1.0, 0.0)));
}

TEST(CheckStochDom, BetaSlackAndInfinities) {
  DiscretePld v({0.0}, {0.9}, 0.0, 0.1);
  DiscretePld u({0.0}, {0.95}, 0.0, 0.05);
  // v has more mass at +inf than u: fails without beta, passes with it.
  EXPECT_FALSE(check_stoch_dom(v, u, TightnessParams(0.0, 0.0)));
  EXPECT_TRUE(check_stoch_dom(v, u, TightnessParams(0.0, 0.06)));
}

TEST(CheckStochDom, DualReversalWithSlack) {
  // For realizations V dominated by U with full finite support, the duals
  // reverse with beta slack p_top(dual U) - p_top(dual V) -- and need not
  // dominate each other in either direction without it.
  const double ln2 = std::log(2.0), ln4 = std::log(4.0);
  DiscretePld v({ln2, ln4}, {0.6, 0.4}, 0.0, 0.0);
  DiscretePld u({ln2, ln4}, {0.4, 0.6}, 0.0, 0.0);
  ASSERT_TRUE(check_stoch_dom(v, u, TightnessParams(0.0, 0.0)));
  DiscretePld dv = pld_dual(v);
  DiscretePld du = pld_dual(u);
  EXPECT_NEAR(dv.p_top(), 0.6, 1e-15);
  EXPECT_NEAR(du.p_top(), 0.65, 1e-15);
  EXPECT_FALSE(check_stoch_dom(du, dv, TightnessParams(0.0, 0.0)));
  EXPECT_FALSE(check_stoch_dom(dv, du, TightnessParams(0.0, 0.0)));
  double c = du.p_top() - dv.p_top();
  EXPECT_TRUE(check_stoch_dom(du, dv, TightnessParams(0.0, c)));
}

TEST(CombineBounds, Idempotent) {
  DiscretePld u = randomized_response_pld();
  DiscretePld c = combine_bounds(u, u, BoundDirection::kUpper);
  ASSERT_EQ(c.size(), u.size());
  for (size_t i = 0; i < u.size(); ++i) {
    EXPECT_DOUBLE_EQ(c.values()[i], u.values()[i]);
    EXPECT_NEAR(c.probs()[i], u.probs()[i], 1e-15);
  }
}

TEST(CombineBounds, UpperTakesCcdfMin) {
  DiscretePld u1 = DiscretePld::point_mass(1.0);
  DiscretePld u2 = DiscretePld::point_mass(2.0);
  DiscretePld c = combine_bounds(u1, u2, BoundDirection::kUpper);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_DOUBLE_EQ(c.values()[0], 1.0);
  DiscretePld cl = combine_bounds(u1, u2, BoundDirection::kLower);
  ASSERT_EQ(cl.size(), 1u);
  EXPECT_DOUBLE_EQ(cl.values()[0], 2.0);
}

TEST(CombineBounds, IncomparableUppersDominatedByBoth) {
  DiscretePld u1({0.0, 2.0}, {0.5, 0.5}, 0.0, 0.0);
  DiscretePld u2({1.0, 3.0}, {0.8, 0.2}, 0.0, 0.0);
  TightnessParams zero(0.0, 0.0);
  ASSERT_FALSE(check_stoch_dom(u1, u2, zero));
  ASSERT_FALSE(check_stoch_dom(u2, u1, zero));
  DiscretePld c = combine_bounds(u1, u2, BoundDirection::kUpper);
  EXPECT_NEAR(c.total_mass(), 1.0, 1e-12);
  EXPECT_TRUE(check_stoch_dom(c, u1, zero));
  EXPECT_TRUE(check_stoch_dom(c, u2, zero));
}

}  // namespace
}  // namespace pld
