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
#include <numeric>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "rdpnoise/accountant.h"
#include "rdpnoise/baselines.h"
#include "rdpnoise/error.h"
#include "test_util.h"

namespace rdpnoise {
namespace {

TailedNoiseFamily Small() {
  return MakeFamily({0.6, 0.1}, 0.5, 1, 1.0, DomainKind::kDiscrete);
}

TEST(MomentsEpsilon, GaussianClosedForm) {
  const double sigma = 8.0;
  const auto rdp = [&](double a) { return a / (2 * sigma * sigma); };
  const auto result = MomentsEpsilon(rdp, 1e-6, 10);
  const double a = 10.0 / (2 * sigma * sigma);
  const double l = std::log(1e6);
  EXPECT_NEAR(result.epsilon, a + 2 * std::sqrt(a * l), 1e-9);
  EXPECT_NEAR(result.epsilon, 2.156, 1e-3);
  EXPECT_NEAR(result.alpha, 1 + std::sqrt(l / a), 1e-4);
}

TEST(MomentsEpsilon, LargeDeltaApproachesKlTerm) {
  const auto rdp = [](double a) { return a / 2.0; };
  double previous = INFINITY;
  for (const double delta : {0.9, 0.99, 0.999}) {
    const double eps = MomentsEpsilon(rdp, delta, 1).epsilon;
    EXPECT_LT(eps, previous);
    previous = eps;
  }
  EXPECT_LT(previous - 0.5, 0.05);
}

TEST(MomentsEpsilon, MinimumOnBracketEndFails) {
  ExpectCode(ErrorCode::kSearchFailure, [] {
    MomentsEpsilon([](double) { return 1e-3; }, 1e-6, 1);
  });
}

TEST(PldFromFamily, ZeroShiftIsAllAtZero) {
  std::mt19937_64 rng(2);
  const auto pld = PldFromFamily(RandomFamily(rng, 10, 0.6), 0, 1e-3);
  EXPECT_EQ(pld.inf_mass(), 0.0);
  EXPECT_NEAR(DeltaForEpsilon(pld, 0.0), 0.0, 1e-15);
  for (std::size_t k = 0; k < pld.size(); ++k) {
    if (pld.masses()[k] > 0) EXPECT_EQ(pld.loss(k), 0.0);
  }
}

TEST(PldFromFamily, SmallFamily) {
  const double w = 1e-4;
  const auto pld = PldFromFamily(Small(), 1, w);
  // Rounding losses up can only raise delta, by at most 1 - e^-w.
  EXPECT_GE(DeltaForEpsilon(pld, 0.0), 0.6 - 1e-12);
  EXPECT_LE(DeltaForEpsilon(pld, 0.0), 0.6 + (1 - std::exp(-w)));
  // The atom at i = 0 carries loss log 6, rounded up by at most one step.
  double at_log6 = 0.0;
  for (std::size_t k = 0; k < pld.size(); ++k) {
    if (pld.loss(k) >= std::log(6.0) && pld.loss(k) < std::log(6.0) + 1e-4) {
      at_log6 += pld.masses()[k];
    }
  }
  EXPECT_NEAR(at_log6, 0.6, 1e-12);
}

TEST(PldFromFamily, MassIsConserved) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = RandomFamily(rng, 5 + trial * 7, 0.5 + 0.02 * trial);
    const auto pld = PldFromFamily(f, 1 + trial % 3, 1e-3);
    EXPECT_NEAR(pld.TotalMass(), 1.0, 1e-9);
  }
}

TEST(PldSelfCompose, IdentityAndBinomial) {
  const double q = 0.3;
  const PrivacyLossDistribution two(1.0, -1, {1 - q, 0.0, q}, 0.0, true);
  const auto once = PldSelfCompose(two, 1);
  EXPECT_EQ(std::vector<double>(once.masses().begin(), once.masses().end()),
            std::vector<double>(two.masses().begin(), two.masses().end()));
  const auto twice = PldSelfCompose(two, 2);
  ASSERT_EQ(twice.offset(), -2);
  ASSERT_EQ(twice.size(), 5u);
  EXPECT_NEAR(twice.masses()[0], (1 - q) * (1 - q), 1e-15);
  EXPECT_NEAR(twice.masses()[2], 2 * q * (1 - q), 1e-15);
  EXPECT_NEAR(twice.masses()[4], q * q, 1e-15);
}

TEST(PldSelfCompose, FftMatchesDirectConvolution) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> m(3000);
  for (double& x : m) x = unit(rng);
  const double total = std::accumulate(m.begin(), m.end(), 0.0);
  for (double& x : m) x /= total;
  const PrivacyLossDistribution pld(1e-3, -1500, m, 0.0, true);
  ComposeSettings settings;
  settings.trim_mass = 0.0;
  const auto composed = PldSelfCompose(pld, 2, settings);
  std::vector<long double> direct(2 * m.size() - 1, 0.0L);
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) direct[i + j] += m[i] * m[j];
  }
  ASSERT_EQ(composed.size(), direct.size());
  for (std::size_t k = 0; k < direct.size(); ++k) {
    ASSERT_NEAR(composed.masses()[k], static_cast<double>(direct[k]), 1e-15);
  }
}

TEST(PldSelfCompose, MeanLossIsLinear) {
  std::mt19937_64 rng(8);
  const auto f = RandomFamily(rng, 30, 0.8);
  const double w = 1e-3;
  const auto pld = PldFromFamily(f, 2, w);
  for (const int nc : {2, 5, 16}) {
    const auto composed = PldSelfCompose(pld, nc);
    EXPECT_NEAR(composed.MeanLoss(), nc * pld.MeanLoss(), nc * w);
  }
}

TEST(PldSelfCompose, GridOverflow) {
  ComposeSettings settings;
  settings.max_grid_points = 100;
  const PrivacyLossDistribution pld(1.0, 0, std::vector<double>(80, 1.0 / 80),
                                    0.0, true);
  ExpectCode(ErrorCode::kGridOverflow,
             [&] { PldSelfCompose(pld, 2, settings); });
}

TEST(DeltaForEpsilon, VanishesBeyondLargestLoss) {
  std::mt19937_64 rng(10);
  const auto pld = PldFromFamily(RandomFamily(rng, 10, 0.7), 1, 1e-3);
  EXPECT_EQ(DeltaForEpsilon(pld, pld.loss(pld.size() - 1)), 0.0);
}

TEST(EpsilonForDelta, UnattainableAndInverse) {
  const PrivacyLossDistribution pld(0.1, -5, std::vector<double>(11, 0.08), 0.12,
                                    true);
  ExpectCode(ErrorCode::kUnattainable, [&] { EpsilonForDelta(pld, 0.01); });
  const double eps = EpsilonForDelta(pld, 0.2);
  EXPECT_NEAR(DeltaForEpsilon(pld, eps), 0.2, 1e-9);
}

TEST(EmbeddedGaussian, SingleCompositionMatchesAnalyticCurve) {
  const double sigma = 4.0, w = 0.04;
  const auto f = EmbedGaussian(sigma, w, 500, GaussianTailRatio(sigma, w, 500));
  const auto pld = PldFromFamily(f, 25, 1e-4);
  for (const double eps : {0.0, 0.1, 0.25, 0.5, 1.0}) {
    EXPECT_NEAR(DeltaForEpsilon(pld, eps), GaussianDelta(sigma, 1.0, eps), 2e-4)
        << "eps=" << eps;
  }
}

TEST(ExactSingleDelta, LimitsAndSmallFamily) {
  EXPECT_NEAR(ExactSingleDelta(Small(), 1, 0.0), 0.6, 1e-14);
  EXPECT_EQ(ExactSingleDelta(Small(), 1, 50.0), 0.0);
}

TEST(ExactSingleDelta, PldWithinRoundingEnvelope) {
  std::mt19937_64 rng(12);
  const double w = 1e-3;
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = RandomFamily(rng, 20, 0.7);
    const int t = 1 + trial % 3;
    const auto pld = PldFromFamily(f, t, w);
    for (const double eps : {0.0, 0.2, 0.7, 1.5, 3.0}) {
      const double exact = ExactSingleDelta(f, t, eps);
      const double grid = DeltaForEpsilon(pld, eps);
      EXPECT_GE(grid, exact - 1e-12);
      EXPECT_LE(grid, exact + (1 - std::exp(-w)) + 1e-12);
    }
  }
}

TEST(AccountFamily, SingleShiftAndPessimism) {
  const auto curve = AccountFamily(Small(), 1.0, 1, std::vector<double>{0.6, 0.1});
  ASSERT_EQ(curve.points.size(), 2u);
  EXPECT_EQ(curve.provenance.accountant, "pld");
  EXPECT_GT(curve.provenance.grid_width, 0.0);
  for (const auto& p : curve.points) {
    // Pessimistic: the exact curve at the reported epsilon is within delta.
    EXPECT_LE(ExactSingleDelta(Small(), 1, p.epsilon), p.delta + 1e-9);
  }
}

TEST(AccountFamily, PldNeverExceedsMomentsAccountant) {
  for (int trial = 0; trial < 6; ++trial) {
    const double sigma = 1.0 + trial;
    const int n = 200 * (trial + 1);  // tail starts 10 sigma out
    const auto f = EmbedGaussian(sigma, 0.05, n, GaussianTailRatio(sigma, 0.05, n));
    for (const int nc : {1, 10}) {
      const double pld = AccountedEpsilon(f, 1.0, nc, 1e-6);
      const double ma = FamilyMomentsEpsilon(f, 1.0, 1e-6, nc).epsilon;
      EXPECT_LE(pld, ma) << "sigma=" << sigma << " nc=" << nc;
    }
  }
}

TEST(WriteCurveCsv, SortedRows) {
  PrivacyCurve curve;
  curve.points = {{2.0, 1e-6}, {1.0, 1e-3}, {3.0, 1e-9}};
  curve.provenance.mechanism = "x";
  curve.provenance.accountant = "pld";
  std::ostringstream out;
  WriteCurveCsv(curve, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "epsilon,delta,mechanism,accountant,compositions,sigma,sensitivity");
  double previous_eps = -1, previous_delta = 1;
  while (std::getline(in, line)) {
    const double eps = std::stod(line);
    const double delta = std::stod(line.substr(line.find(',') + 1));
    EXPECT_GT(eps, previous_eps);
    EXPECT_LE(delta, previous_delta);
    previous_eps = eps;
    previous_delta = delta;
  }
}

}  // namespace
}  // namespace rdpnoise
