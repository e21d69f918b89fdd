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

#include "rdpnoise/accountant.h"
#include "rdpnoise/baselines.h"
#include "rdpnoise/error.h"
#include "rdpnoise/optimizer.h"
#include "test_util.h"

namespace rdpnoise {
namespace {

OptimizationProblem SmallDiscrete(double sigma = 2.0) {
  OptimizationProblem p;
  p.sigma = sigma;
  p.sensitivity = 3.0;
  p.kind = DomainKind::kDiscrete;
  p.bin_width = 1.0;
  p.tail_start = 40;
  p.tail_ratio = 0.9;
  p.compositions = 4;
  p.target_delta = 1e-5;
  return p;
}

TEST(AlphaInit, ClosedForm) {
  const long double l = std::log(1e6L);
  EXPECT_NEAR(AlphaInit(8, 1, 1e-6, 10).value(),
              static_cast<double>(1 + 8 * std::sqrt(2 * l / 10)), 1e-12);
  EXPECT_NEAR(AlphaInit(8, 1, 1e-6, 10).value(), 14.298, 5e-4);
  EXPECT_NEAR(AlphaInit(3, 3, std::exp(-1.0), 2).value(), 2.0, 1e-12);
  EXPECT_NEAR(AlphaInit(4, 1, 1e-6, 20).value(),
              static_cast<double>(1 + 4 * std::sqrt(2 * l / 20)), 1e-12);
}

TEST(BuildConstraints, SmallSystem) {
  OptimizationProblem p;
  p.sigma = std::sqrt(2.4);
  p.kind = DomainKind::kDiscrete;
  p.bin_width = 1.0;
  p.tail_start = 1;
  p.tail_ratio = 0.5;
  const auto c = BuildConstraints(p);
  EXPECT_NEAR(c.a[0][0], 0.0, 1e-15);
  EXPECT_NEAR(c.a[0][1], 24.0, 1e-12);
  EXPECT_NEAR(c.a[1][0], 1.0, 1e-15);
  EXPECT_NEAR(c.a[1][1], 4.0, 1e-15);
  EXPECT_NEAR(c.b[0], 2.4, 1e-12);
  EXPECT_EQ(c.b[1], 1.0);
  const std::vector<double> fam = {0.6, 0.1};
  EXPECT_LE(c.Residual(fam), 1e-12);

  p.kind = DomainKind::kContinuous;
  const auto cc = BuildConstraints(p);
  EXPECT_NEAR(cc.a[0][1], 24.0, 1e-12);
  EXPECT_NEAR(cc.b[0], 2.4 - 1.0 / 12.0, 1e-12);
}

TEST(BuildConstraints, RankTwo) {
  for (int n : {2, 5, 100}) {
    OptimizationProblem p = SmallDiscrete();
    p.tail_start = n;
    const auto c = BuildConstraints(p);
    // Some 2x2 minor is nonzero.
    double best = 0.0;
    for (int j = 1; j <= n; ++j) {
      best = std::max(best, std::abs(c.a[0][0] * c.a[1][j] - c.a[0][j] * c.a[1][0]));
    }
    EXPECT_GT(best, 0.0);
  }
}

TEST(InitDistribution, DiscreteVarianceMatches) {
  OptimizationProblem p = SmallDiscrete();
  p.sensitivity = 1.0;
  const auto f = InitDistribution(p);
  EXPECT_NEAR(Variance(f), 4.0, 4e-9);
}

TEST(InitDistribution, GaussianTailedVersionMatchesMomentsClosedForm) {
  OptimizationProblem p;
  p.sigma = 8.0;
  p.bin_width = 0.01;
  p.tail_start = 8000;
  p.tail_ratio = GaussianTailRatio(8.0, 0.01, 8000);
  const auto f = InitDistribution(p);
  EXPECT_NEAR(Variance(f), 64.0, 64e-9);
  const double l = std::log(1e6);
  const double a = 10.0 / (2 * 64.0);
  const double closed = a + 2 * std::sqrt(a * l);
  EXPECT_NEAR(closed, 2.156, 1e-3);
  EXPECT_NEAR(FamilyMomentsEpsilon(f, 1.0, 1e-6, 10).epsilon, closed, 1e-3);
}

TEST(InitDistribution, DegenerateBudget) {
  OptimizationProblem p;
  p.sigma = 0.001;
  p.bin_width = 0.01;
  p.tail_start = 100;
  ExpectCode(ErrorCode::kBisectionFailure, [&] { InitDistribution(p); });
}

TEST(OptimizationProblem, Validation) {
  OptimizationProblem p;
  p.bin_width = 0.03;
  ExpectCode(ErrorCode::kInvalidArgument, [&] { p.Validate(); });
  p = SmallDiscrete();
  p.bin_width = 0.5;
  ExpectCode(ErrorCode::kDomainViolation, [&] { p.Validate(); });
  p = SmallDiscrete();
  p.target_delta = 1.5;
  ExpectCode(ErrorCode::kInvalidArgument, [&] { p.Validate(); });
}

TEST(RestoreFeasibility, LandsOnConstraints) {
  const OptimizationProblem problem = SmallDiscrete();
  const auto c = BuildConstraints(problem);
  const auto init = InitDistribution(problem);
  std::vector<double> p(init.head().begin(), init.head().end());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] *= 1.0 + 1e-3 * std::sin(k);
  EXPECT_GT(c.Residual(p), 1e-6);
  RestoreFeasibility(c, p);
  EXPECT_LE(c.Residual(p), 1e-12);
}

TEST(ProjectOntoConstraints, DirectionIsInNullSpace) {
  const OptimizationProblem problem = SmallDiscrete();
  const auto c = BuildConstraints(problem);
  const auto f = InitDistribution(problem);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  std::vector<double> g(f.head().size());
  for (double& x : g) x = normal(rng);
  const auto d = ProjectOntoConstraints(c, f.head(), g);
  for (int row = 0; row < 2; ++row) {
    double dot = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k) {
      dot += c.a[row][k] * f.head()[k] * d[k];
      scale += std::abs(c.a[row][k] * f.head()[k]);
    }
    EXPECT_LE(std::abs(dot), 1e-12 * scale);
  }
}

TEST(DescentStep, InvariantsOverManySteps) {
  const OptimizationProblem problem = SmallDiscrete();
  const auto c = BuildConstraints(problem);
  const int max_shift = problem.shifts().max_shift();
  const RenyiOrder order(4.0);
  const SolverSettings settings;
  const auto f = InitDistribution(problem);
  std::vector<double> p(f.head().begin(), f.head().end());
  int accepted = 0;
  for (int k = 0; k < 60; ++k) {
    const auto step =
        DescentStep(p, problem.tail_ratio, max_shift, order, c, settings);
    const auto& r = step.report;
    ASSERT_LE(r.log_g_after, r.log_g_before);
    ASSERT_LE(c.Residual(step.p), 1e-8);
    ASSERT_GT(*std::min_element(step.p.begin(), step.p.end()), 0.0);
    if (r.accepted) {
      ++accepted;
      // The step bound itself zeroes a coordinate and is never taken.
      ASSERT_LT(r.mu, r.mu_upper);
      ASSERT_TRUE(std::isfinite(r.log_g_after));
    } else {
      ASSERT_EQ(step.p, p);
    }
    p = step.p;
  }
  EXPECT_GT(accepted, 10);
}

TEST(NewtonAlpha, ConvergesOnGaussian) {
  const auto f = EmbedGaussian(8.0, 0.01, 8000, GaussianTailRatio(8.0, 0.01, 8000));
  const TailedMasses m{f.head(), f.tail_ratio()};
  const SolverSettings settings;
  RenyiOrder alpha(10.0);
  double gamma = MomentsBound(m, 100, alpha.value(), 10, 1e-6);
  for (int k = 0; k < 3; ++k) {
    alpha = NewtonAlpha(m, 100, alpha, 10, 1e-6, settings);
    const double next = MomentsBound(m, 100, alpha.value(), 10, 1e-6);
    EXPECT_LE(next, gamma);
    gamma = next;
  }
  const double optimum = 1.0 + std::sqrt(std::log(1e6) / (10.0 / 128.0));
  EXPECT_NEAR(alpha.value(), optimum, 0.02);
  // Once converged the update is a no-op within the fd tolerance.
  const RenyiOrder converged = NewtonAlpha(m, 100, alpha, 10, 1e-6, settings);
  const RenyiOrder again = NewtonAlpha(m, 100, converged, 10, 1e-6, settings);
  EXPECT_NEAR(again.value(), converged.value(), 1e-3);
}

TEST(Optimize, TraceInvariantsAndMonotoneEpsilon) {
  const OptimizationProblem problem = SmallDiscrete();
  SolverSettings settings;
  settings.iterations = 200;
  settings.alpha_update_period = 20;
  const auto result = Optimize(problem, settings);
  ASSERT_EQ(result.trace.size(), 201u);
  for (std::size_t k = 1; k < result.trace.size(); ++k) {
    const auto& prev = result.trace[k - 1];
    const auto& cur = result.trace[k];
    EXPECT_LE(cur.residual, 1e-8);
    EXPECT_LE(cur.epsilon, prev.epsilon + 1e-12);
    if (!cur.alpha_updated) EXPECT_LE(cur.log_g, prev.log_g);
  }
  EXPECT_LT(result.trace.back().epsilon, result.trace.front().epsilon);
  EXPECT_NEAR(Variance(result.family), 4.0, 1e-8);
  EXPECT_EQ(result.final_alpha.value(), result.trace.back().alpha);
}

TEST(Optimize, Deterministic) {
  SolverSettings settings;
  settings.iterations = 50;
  const auto a = Optimize(SmallDiscrete(), settings);
  const auto b = Optimize(SmallDiscrete(), settings);
  EXPECT_TRUE(std::equal(a.family.head().begin(), a.family.head().end(),
                         b.family.head().begin()));
}

// With a smaller variance budget the optimum is strictly worse, so the cost
// constraint is active and the equality form loses nothing.
TEST(Optimize, CostConstraintIsActive) {
  SolverSettings settings;
  settings.iterations = 150;
  const auto full = Optimize(SmallDiscrete(2.0), settings);
  const auto tight = Optimize(SmallDiscrete(2.0 * 0.99), settings);
  const double eps_full =
      FamilyMomentsEpsilon(full.family, 3.0, 1e-5, 4).epsilon;
  const double eps_tight =
      FamilyMomentsEpsilon(tight.family, 3.0, 1e-5, 4).epsilon;
  EXPECT_GT(eps_tight, eps_full);
}

TEST(TraceRecord, FormatIsOneJsonLine) {
  TraceRecord r;
  r.iteration = 3;
  r.alpha = 2.5;
  const std::string line = FormatTraceRecord(r);
  EXPECT_EQ(line.find('\n'), std::string::npos);
  EXPECT_NE(line.find("\"iteration\":3"), std::string::npos);
}

}  // namespace
}  // namespace rdpnoise
