// Copyright 2026 The RDP Noise Authors
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
#include <random>

#include <gtest/gtest.h>

#include "rdpnoise/error.h"
#include "rdpnoise/optimizer.h"
#include "rdpnoise/rdp_objective.h"
#include "test_util.h"

namespace rdpnoise {
namespace {

TailedNoiseFamily Small() {
  return MakeFamily({0.6, 0.1}, 0.5, 1, 1.0, DomainKind::kDiscrete);
}

TEST(RenyiOrder, RejectsOrdersAtOrBelowOne) {
  for (const double bad : {1.0, 0.5, -2.0, HUGE_VAL, std::nan("")}) {
    ExpectCode(ErrorCode::kInvalidOrder, [bad] { RenyiOrder order(bad); });
  }
  EXPECT_EQ(RenyiOrder(1.5).value(), 1.5);
}

TEST(ShiftSet, RequiresIntegerRatio) {
  EXPECT_EQ(ShiftSet::Create(1.0, 0.01).max_shift(), 100);
  EXPECT_EQ(ShiftSet::Create(2.0, 0.02).max_shift(), 100);
  ExpectCode(ErrorCode::kInvalidArgument, [] { ShiftSet::Create(1.0, 0.03); });
  ExpectCode(ErrorCode::kInvalidArgument, [] { ShiftSet::Create(0.5, 1.0); });
}

TEST(GShift, HandValueBothPaths) {
  const auto f = Small();
  const RenyiOrder two(2.0);
  EXPECT_NEAR(GShift(f, 1, two), 61.0 / 15.0, 1e-12 * 61.0 / 15.0);
  EXPECT_NEAR(GBrute(f, 1, two, BruteTailTermsFor(f, 1, two)), 61.0 / 15.0,
              1e-12 * 61.0 / 15.0);
}

TEST(GShift, ZeroShiftIsOne) {
  std::mt19937_64 rng(3);
  const auto f = RandomFamily(rng, 20, 0.7);
  EXPECT_NEAR(GShift(f, 0, RenyiOrder(3.0)), 1.0, 1e-12);
  EXPECT_NEAR(GBrute(f, 0, RenyiOrder(3.0), 4096), 1.0, 1e-12);
}

TEST(GShift, GaussianShapedFamilyMatchesGaussianRdp) {
  OptimizationProblem problem;
  problem.sigma = 1.0;
  problem.bin_width = 0.02;
  problem.tail_start = 400;
  const auto f = InitDistribution(problem);
  const double alpha = 2.0;
  const double expected = std::exp((alpha - 1.0) * alpha / 2.0);
  EXPECT_NEAR(GShift(f, 50, RenyiOrder(alpha)), expected, 0.01 * expected);
}

TEST(GMax, SmallFamily) {
  const auto report =
      GMax(Small(), ShiftSet::Create(1.0, 1.0), RenyiOrder(2.0));
  EXPECT_NEAR(report.g_value(), 61.0 / 15.0, 1e-12);
  EXPECT_EQ(report.t_star, 1);
  EXPECT_NEAR(report.rdp, std::log(61.0 / 15.0), 1e-12);
}

TEST(GMax, GaussianShapedFamilyPeaksAtLargestShift) {
  OptimizationProblem problem;
  problem.sigma = 2.0;
  problem.bin_width = 0.05;
  problem.tail_start = 400;
  const auto f = InitDistribution(problem);
  const RenyiOrder order(4.0);
  double previous = 0.0;
  for (int t = 1; t <= 20; ++t) {
    const double g = GShift(f, t, order);
    EXPECT_GE(g, previous);
    previous = g;
  }
  EXPECT_EQ(GMax(f, ShiftSet::Create(1.0, 0.05), order).t_star, 20);
}

TEST(GMax, RejectsMismatchedBinWidth) {
  ExpectCode(ErrorCode::kInvalidArgument, [] {
    GMax(Small(), ShiftSet::Create(1.0, 0.5), RenyiOrder(2.0));
  });
}

TEST(RenyiObjective, StrictPositivityRequired) {
  const std::vector<double> p = {0.6, 0.0, 0.1};
  ExpectCode(ErrorCode::kStrictFeasibilityViolation, [&] {
    RenyiObjective(TailedMasses{p, 0.5}, RenyiOrder(2.0), 1);
  });
}

TEST(RenyiObjective, LargeOrderStaysFinite) {
  OptimizationProblem problem;
  problem.sigma = 1.0;
  problem.bin_width = 0.02;
  problem.tail_start = 400;
  const auto f = InitDistribution(problem);
  // g itself overflows here; log g must not.
  const RenyiObjective objective(TailedMasses{f.head(), f.tail_ratio()},
                                 RenyiOrder(150.0), 50);
  const auto report = objective.Max();
  EXPECT_TRUE(std::isfinite(report.log_g));
  EXPECT_GT(report.log_g, 0.0);
}

TEST(GradG, HandDerivative) {
  const auto grad = GradG(Small(), 1, RenyiOrder(2.0));
  EXPECT_NEAR(grad[0], 12.0 - 1.0 / 36.0, 1e-12);
}

TEST(GradG, PreconditionedEntriesSumToOne) {
  std::mt19937_64 rng(5);
  const auto f = RandomFamily(rng, 40, 0.9);
  const RenyiObjective objective(TailedMasses{f.head(), f.tail_ratio()},
                                 RenyiOrder(3.0), 4);
  const auto q = objective.PreconditionedLogGradient(4);
  double sum = 0.0;
  bool positive = false, negative = false;
  for (double x : q) {
    sum += x;
    positive |= x > 0;
    negative |= x < 0;
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
  EXPECT_TRUE(positive && negative);
}

// Central differences of g on raw (unnormalized) vectors, step 1e-6 p_k.
// Components are compared in the diag(p) scaling, relative to the largest.
TEST(GradG, MatchesFiniteDifferences) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ratio(0.5, 0.99);
  int checked = 0;
  for (const int n : {10, 100, 1000}) {
    for (const double alpha : {1.5, 4.0, 16.0}) {
      for (int trial = 0; trial < 12; ++trial, ++checked) {
        const auto f = RandomFamily(rng, n, ratio(rng));
        const int t = 1 + static_cast<int>(rng() % 5);
        const RenyiOrder order(alpha);
        const auto grad = GradG(f, t, order);
        std::vector<double> p(f.head().begin(), f.head().end());
        auto g_at = [&](const std::vector<double>& v) {
          return std::exp(RenyiObjective(TailedMasses{v, f.tail_ratio()},
                                         order, t)
                              .LogG(t));
        };
        double scale = 0.0;
        for (std::size_t k = 0; k < p.size(); ++k) {
          scale = std::max(scale, std::abs(p[k] * grad[k]));
        }
        for (std::size_t k = 0; k < p.size(); ++k) {
          const double h = 1e-6 * p[k];
          auto up = p, down = p;
          up[k] += h;
          down[k] -= h;
          const double fd = (g_at(up) - g_at(down)) / (2 * h);
          ASSERT_LE(std::abs(p[k] * (fd - grad[k])), 1e-5 * scale)
              << "n=" << n << " alpha=" << alpha << " k=" << k;
        }
      }
    }
  }
  EXPECT_GE(checked, 100);
}

TEST(GBrute, MatchesClosedFormOnRandomTriples) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> ratio(0.3, 0.95);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 60);
    const double r = ratio(rng);
    const int max_shift = 1 + static_cast<int>(rng() % 4);
    const double alpha_max = 1.0 + std::abs(std::log(r)) * n / (2.0 * max_shift);
    const RenyiOrder order(1.0 + (alpha_max - 1.0) * (0.01 + 0.99 * unit(rng)));
    const auto f = RandomFamily(rng, n, r);
    const int t = 1 + static_cast<int>(rng() % max_shift);
    const double closed = GShift(f, t, order);
    const double brute = GBrute(f, t, order, BruteTailTermsFor(f, t, order));
    ASSERT_NEAR(closed, brute, 1e-10 * brute)
        << "n=" << n << " r=" << r << " t=" << t << " a=" << order.value();
  }
}

TEST(GBrute, InsufficientTailTermsThrow) {
  const auto f = MakeFamily({0.6, 0.1}, 0.5, 1, 1.0, DomainKind::kDiscrete);
  ExpectCode(ErrorCode::kDivergentTail, [&] { GBrute(f, 1, RenyiOrder(2.0), 4); });
}

TEST(Properties, SymmetryAndMidpointConvexity) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = RandomFamily(rng, 30, 0.8);
    const auto b = RandomFamily(rng, 30, 0.8);
    for (std::int64_t i = 0; i < 60; ++i) {
      ASSERT_EQ(MassAt(a, i), MassAt(a, -i));
    }
    std::vector<double> mid(31);
    for (std::size_t k = 0; k < mid.size(); ++k) {
      mid[k] = 0.5 * (a.head()[k] + b.head()[k]);
    }
    const auto m = MakeFamily(mid, 0.8, 30, 1.0, DomainKind::kDiscrete);
    const auto shifts = ShiftSet::Create(3.0, 1.0);
    const RenyiOrder order(2.5);
    const double ga = GMax(a, shifts, order).g_value();
    const double gb = GMax(b, shifts, order).g_value();
    const double gm = GMax(m, shifts, order).g_value();
    ASSERT_LE(gm, 0.5 * (ga + gb) * (1 + 1e-12));
  }
}

}  // namespace
}  // namespace rdpnoise
