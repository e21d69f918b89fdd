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

// Noise optimization: minimize max_t g_alpha(p, t) over the tailed family
// subject to the variance and normalization equalities, with alpha tracked
// by Newton steps on the moments-accountant bound
//
//   gamma(alpha) = (N_c log g_alpha(p) + log(1/delta)) / (alpha - 1).
//
// The iteration is a projected gradient method in the coordinates q = p / p_k
// (preconditioner diag(p)^-1), so each step is p_k (1 - mu g_proj_k) and a
// step bound keeps every coordinate strictly positive.

#ifndef RDPNOISE_OPTIMIZER_H_
#define RDPNOISE_OPTIMIZER_H_

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rdpnoise/noise_family.h"
#include "rdpnoise/rdp_objective.h"

namespace rdpnoise {

struct OptimizationProblem {
  double target_delta = 1e-6;
  int compositions = 1;
  double sigma = 1.0;
  double sensitivity = 1.0;
  DomainKind kind = DomainKind::kContinuous;
  int tail_start = 1000;
  double tail_ratio = 0.9999;
  double bin_width = 0.01;

  // Throws kInvalidArgument / kDomainViolation / kRangeViolation, or
  // kBisectionFailure when sigma^2 is below the in-bin variance.
  void Validate() const;
  ShiftSet shifts() const;
};

struct SolverSettings {
  int iterations = 500;
  int alpha_update_period = 25;
  int backtracking_depth = 10;
  double bisection_rel_tol = 1e-9;
  int bisection_max_iterations = 200;
  double alpha_floor = 1.0 + 1e-3;
  // Finite-difference step for gamma' and gamma'', relative to alpha.
  double fd_step_alpha = 1e-4;

  void Validate() const;
};

// Rows: 0 = variance (cost) equality, 1 = normalization.
struct ConstraintSystem {
  std::array<std::vector<double>, 2> a;
  std::array<double, 2> b{};

  // max_r |A_r p - b_r|.
  double Residual(std::span<const double> p) const;
};

struct TraceRecord {
  int iteration = 0;
  double log_g = 0.0;    // log max_t g_alpha(p_k, t)
  double rdp = 0.0;      // log_g / (alpha - 1)
  double epsilon = 0.0;  // moments-accountant bound gamma(alpha)
  double alpha = 0.0;
  int t_star = 1;
  double mu = 0.0;  // accepted step, 0 if the iterate was kept
  double residual = 0.0;
  double min_mass = 0.0;  // min_k p_k
  bool alpha_updated = false;
};

// One JSON object per line.
std::string FormatTraceRecord(const TraceRecord& record);

struct OptimizedNoise {
  TailedNoiseFamily family;
  RenyiOrder final_alpha;
  std::vector<TraceRecord> trace;
};

// Moments-accountant optimal order for Gaussian noise:
// sqrt(2 log(1/delta) / N_c) * sigma / s + 1.
RenyiOrder AlphaInit(double sigma, double sensitivity, double target_delta,
                     int compositions);

ConstraintSystem BuildConstraints(const OptimizationProblem& problem);

// Bins of N(0, c_hat) with the tail anchored at (1 - r) times the Gaussian
// mass beyond (N - 1/2) w, renormalized to a valid family.
std::vector<double> GaussianShapedMasses(double c_hat, int tail_start,
                                         double tail_ratio, double bin_width);

// Gaussian-shaped starting point whose variance matches sigma^2, found by
// bisection on the variance of the generating Gaussian. Throws
// kBisectionFailure or kStrictFeasibilityViolation.
TailedNoiseFamily InitDistribution(const OptimizationProblem& problem,
                                   const SolverSettings& settings = {});

// Minimal correction in the diag(p)^2 metric that puts p back on A p = b.
void RestoreFeasibility(const ConstraintSystem& constraints,
                        std::vector<double>& p);

// Orthogonal projection of g onto the null space of B = A diag(p). Throws
// kSingularProjection when B B^T is numerically singular.
std::vector<double> ProjectOntoConstraints(const ConstraintSystem& constraints,
                                           std::span<const double> p,
                                           std::span<const double> g);

struct StepReport {
  bool accepted = false;
  double mu = 0.0;
  double mu_upper = 0.0;
  double log_g_before = 0.0;
  double log_g_after = 0.0;
  int t_star = 1;
  int t_star_after = 1;
  int rejected_nonpositive = 0;  // candidates that left the positive orthant
};

struct DescentResult {
  std::vector<double> p;
  StepReport report;
};

// One preconditioned projected-gradient step with backtracking over
// mu in {mu_ub, mu_ub / 2, ..., mu_ub / 2^depth}. Returns the input unchanged
// if no candidate improves the objective.
DescentResult DescentStep(std::span<const double> p, double tail_ratio,
                          int max_shift, RenyiOrder order,
                          const ConstraintSystem& constraints,
                          const SolverSettings& settings);

// gamma(alpha) for the given masses.
double MomentsBound(TailedMasses masses, int max_shift, double alpha,
                    int compositions, double target_delta);

// Safeguarded Newton step on gamma(alpha), derivatives by central
// differences. Returns the input order when the step does not improve gamma
// or would cross alpha_floor.
RenyiOrder NewtonAlpha(TailedMasses masses, int max_shift, RenyiOrder order,
                       int compositions, double target_delta,
                       const SolverSettings& settings);

using TraceCallback = std::function<void(const TraceRecord&)>;

OptimizedNoise Optimize(const OptimizationProblem& problem,
                        const SolverSettings& settings = {},
                        const TraceCallback& on_record = {});

}  // namespace rdpnoise

#endif  // RDPNOISE_OPTIMIZER_H_
