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

#include "rdpnoise_tools/calibrate.h"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "rdpnoise/baselines.h"
#include "rdpnoise/error.h"

namespace rdpnoise::tools {
namespace {

// Half-width, as a factor around the Gaussian solution, of the bracket used
// for mechanisms that need an optimizer run or an accountant pass per probe.
constexpr double kBracketFactor = 1.5;

}  // namespace

SigmaCalibrator::SigmaCalibrator(CalibrationBlock block, SolverSettings solver,
                                 AccountSettings accountant)
    : block_(block), solver_(solver), accountant_(accountant) {
  solver_.iterations = block_.iterations;
}

double SigmaCalibrator::ProbeSensitivity(const CalibrationTarget& target) {
  const auto key = std::make_tuple(target.epsilon, target.delta,
                                   target.compositions, target.accountant);
  if (auto it = probe_s_.find(key); it != probe_s_.end()) return it->second;
  CalibrationTarget gaussian = target;
  gaussian.mechanism = "gaussian";
  const double anchor = Calibrate(gaussian);
  const long shifts = std::max(
      1L, std::lround(block_.tail_start / (block_.head_sigmas * anchor)));
  return probe_s_[key] = static_cast<double>(shifts) * block_.bin_width;
}

OptimizationProblem SigmaCalibrator::ProblemAt(const CalibrationTarget& target,
                                               double sigma) {
  OptimizationProblem p;
  p.target_delta = target.delta;
  p.compositions = target.compositions;
  p.sensitivity = ProbeSensitivity(target);
  p.sigma = sigma * p.sensitivity;
  p.kind = DomainKind::kContinuous;
  p.bin_width = block_.bin_width;
  p.tail_ratio = block_.tail_ratio;
  p.tail_start = block_.tail_start;
  return p;
}

SigmaCalibrator::Entry& SigmaCalibrator::Optimized(
    const CalibrationTarget& target, double sigma) {
  const auto key = std::make_tuple(std::llround(sigma * 1e4), target.delta,
                                   target.compositions, target.accountant);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  // The cached run uses the rounded sigma so that a cache hit is exact.
  const double rounded = static_cast<double>(std::get<0>(key)) * 1e-4;
  OptimizedNoise result = Optimize(ProblemAt(target, rounded), solver_);
  ++optimizer_runs_;
  const double eps = AccountFor(target, result.family, ProbeSensitivity(target));
  Entry entry{std::make_unique<TailedNoiseFamily>(std::move(result.family)),
              eps};
  return cache_.emplace(key, std::move(entry)).first->second;
}

const TailedNoiseFamily& SigmaCalibrator::OptimizedAt(
    const CalibrationTarget& target, double sigma) {
  return *Optimized(target, sigma).family;
}

double SigmaCalibrator::AccountFor(const CalibrationTarget& target,
                                   const TailedNoiseFamily& family,
                                   double sensitivity) const {
  if (target.accountant == "moments") {
    return FamilyMomentsEpsilon(family, sensitivity, target.delta,
                                target.compositions)
        .epsilon;
  }
  return AccountedEpsilon(family, sensitivity, target.compositions,
                          target.delta, accountant_);
}

double SigmaCalibrator::EpsilonAt(const CalibrationTarget& target,
                                  double sigma) {
  if (target.accountant != "pld" && target.accountant != "moments") {
    throw Error(ErrorCode::kInvalidArgument,
                "unknown accountant '" + target.accountant + "'");
  }
  const std::string& m = target.mechanism;
  if (m == "rdp") return Optimized(target, sigma).epsilon;
  const Mechanism mech = ParseMechanism(m);
  if (mech == Mechanism::kGaussian) {
    const double nc = target.compositions;
    if (target.accountant == "moments") {
      // min over alpha of N_c alpha / (2 sigma^2) + log(1/delta) / (alpha - 1)
      const double log_inv = -std::log(target.delta);
      return nc / (2.0 * sigma * sigma) +
             std::sqrt(2.0 * nc * log_inv) / sigma;
    }
    return GaussianEpsilon(sigma / std::sqrt(nc), 1.0, target.delta);
  }
  if (mech == Mechanism::kLaplace) {
    return AccountFor(target,
                      BaselineFamily(mech, sigma, block_.bin_width,
                                     block_.tail_start),
                      1.0);
  }
  const int n = static_cast<int>(std::ceil(12.0 * sigma)) + 20;
  return AccountFor(target, BaselineFamily(mech, sigma, 1.0, n), 1.0);
}

double SigmaCalibrator::Calibrate(const CalibrationTarget& target) {
  double lo = block_.sigma_lo;
  double hi = block_.sigma_hi;
  if (target.mechanism != "gaussian") {
    // Anchor expensive searches on the closed-form Gaussian solution.
    CalibrationTarget gaussian = target;
    gaussian.mechanism = "gaussian";
    const double anchor = Calibrate(gaussian);
    lo = std::max(lo, anchor / kBracketFactor);
    hi = std::min(hi, anchor * kBracketFactor);
  }
  double eps_lo = EpsilonAt(target, lo);
  double eps_hi = EpsilonAt(target, hi);
  if (!(eps_lo >= target.epsilon && eps_hi <= target.epsilon)) {
    throw Error(ErrorCode::kCalibrationFailure,
                target.mechanism + ": epsilon over sigma in [" +
                    std::to_string(lo) + ", " + std::to_string(hi) +
                    "] spans [" + std::to_string(eps_hi) + ", " +
                    std::to_string(eps_lo) + "], missing target " +
                    std::to_string(target.epsilon));
  }
  for (int probe = 0; probe < block_.max_probes; ++probe) {
    const double mid = std::sqrt(lo * hi);
    const double eps = EpsilonAt(target, mid);
    if (std::abs(eps - target.epsilon) <= block_.tolerance) return mid;
    (eps > target.epsilon ? lo : hi) = mid;
  }
  throw Error(ErrorCode::kCalibrationFailure,
              target.mechanism + ": no sigma within tolerance after " +
                  std::to_string(block_.max_probes) + " probes");
}

}  // namespace rdpnoise::tools
