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

#include "rdpnoise/optimizer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "rdpnoise/error.h"

namespace rdpnoise {
namespace {

constexpr double kMaxProjectionCondition = 1e12;

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Rows of B = A diag(p), each scaled to unit length. Row scaling leaves the
// null space unchanged but keeps the 2x2 Gram matrix well scaled, so its
// condition number reflects the geometry rather than units.
struct ScaledRows {
  std::array<std::vector<double>, 2> row;
  std::array<double, 2> scale{};  // 1 / ||A_r diag(p)||
  double cross = 0.0;             // <row0, row1>
};

ScaledRows ScaleRows(const ConstraintSystem& constraints,
                     std::span<const double> p) {
  ScaledRows out;
  for (int r = 0; r < 2; ++r) {
    const auto& a = constraints.a[r];
    if (a.size() != p.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "constraint width does not match the probability vector");
    }
    auto& row = out.row[r];
    row.resize(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) row[k] = a[k] * p[k];
    const double norm = std::sqrt(Dot(row, row));
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw Error(ErrorCode::kSingularProjection, "constraint row vanishes");
    }
    for (double& x : row) x /= norm;
    out.scale[r] = 1.0 / norm;
  }
  out.cross = Dot(out.row[0], out.row[1]);
  const double c = std::abs(out.cross);
  const double condition = (1.0 + c) / (1.0 - c);
  if (!(condition <= kMaxProjectionCondition)) {
    throw Error(ErrorCode::kSingularProjection,
                "B B^T condition number " + std::to_string(condition) +
                    " exceeds 1e12");
  }
  return out;
}

// Solves [[1, c], [c, 1]] x = y.
std::array<double, 2> SolveGram(double c, std::array<double, 2> y) {
  const double det = 1.0 - c * c;
  return {(y[0] - c * y[1]) / det, (y[1] - c * y[0]) / det};
}

void ProjectInPlace(const ScaledRows& rows, std::vector<double>& g) {
  const auto lambda =
      SolveGram(rows.cross, {Dot(rows.row[0], g), Dot(rows.row[1], g)});
  for (std::size_t k = 0; k < g.size(); ++k) {
    g[k] -= lambda[0] * rows.row[0][k] + lambda[1] * rows.row[1][k];
  }
}

bool StrictlyPositive(std::span<const double> p) {
  for (double x : p) {
    if (!(x > 0.0) || !std::isfinite(x)) return false;
  }
  return true;
}

double Gamma(double log_g, double alpha, int compositions,
             double target_delta) {
  return (compositions * log_g + std::log(1.0 / target_delta)) / (alpha - 1.0);
}

}  // namespace

void OptimizationProblem::Validate() const {
  if (!(target_delta > 0.0 && target_delta < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "target delta must lie in (0, 1)");
  }
  if (compositions < 1) {
    throw Error(ErrorCode::kInvalidArgument, "compositions must be >= 1");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::kInvalidArgument, "sigma must be positive");
  }
  if (tail_start < 1) {
    throw Error(ErrorCode::kRangeViolation, "tail start N must be >= 1");
  }
  if (!(tail_ratio > 0.0 && tail_ratio < 1.0)) {
    throw Error(ErrorCode::kRangeViolation, "tail ratio must lie in (0, 1)");
  }
  if (kind == DomainKind::kDiscrete && bin_width != 1.0) {
    throw Error(ErrorCode::kDomainViolation,
                "discrete problems require bin width 1");
  }
  shifts();
  const double min_variance =
      kind == DomainKind::kContinuous ? bin_width * bin_width / 12.0 : 0.0;
  if (!(sigma * sigma > min_variance)) {
    // No generating variance in [0, 2 sigma^2] can bracket the target.
    throw Error(ErrorCode::kBisectionFailure,
                "sigma^2 must exceed the minimum attainable variance " +
                    std::to_string(min_variance));
  }
}

ShiftSet OptimizationProblem::shifts() const {
  return ShiftSet::Create(sensitivity, bin_width);
}

void SolverSettings::Validate() const {
  if (iterations < 0 || alpha_update_period < 1 || backtracking_depth < 1 ||
      !(bisection_rel_tol > 0.0) || bisection_max_iterations < 1 ||
      !(alpha_floor > 1.0) || !(fd_step_alpha > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid solver settings");
  }
}

double ConstraintSystem::Residual(std::span<const double> p) const {
  double worst = 0.0;
  for (int r = 0; r < 2; ++r) {
    worst = std::max(worst, std::abs(Dot(a[r], p) - b[r]));
  }
  return worst;
}

std::string FormatTraceRecord(const TraceRecord& record) {
  nlohmann::json j;
  j["iteration"] = record.iteration;
  j["log_g"] = record.log_g;
  j["rdp"] = record.rdp;
  j["epsilon_ma"] = record.epsilon;
  j["alpha"] = record.alpha;
  j["t_star"] = record.t_star;
  j["mu"] = record.mu;
  j["residual"] = record.residual;
  j["min_mass"] = record.min_mass;
  j["alpha_updated"] = record.alpha_updated;
  return j.dump();
}

RenyiOrder AlphaInit(double sigma, double sensitivity, double target_delta,
                     int compositions) {
  if (!(sigma > 0.0) || !(sensitivity > 0.0) || compositions < 1 ||
      !(target_delta > 0.0 && target_delta < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid alpha_init inputs");
  }
  return RenyiOrder(std::sqrt(2.0 * std::log(1.0 / target_delta) /
                              compositions) *
                        (sigma / sensitivity) +
                    1.0);
}

ConstraintSystem BuildConstraints(const OptimizationProblem& problem) {
  const int n = problem.tail_start;
  const double w = problem.bin_width;
  const double r = problem.tail_ratio;
  ConstraintSystem c;
  c.a[0].assign(n + 1, 0.0);
  c.a[1].assign(n + 1, 2.0);
  for (int i = 1; i < n; ++i) {
    c.a[0][i] = 2.0 * w * w * static_cast<double>(i) * static_cast<double>(i);
  }
  c.a[0][n] = 2.0 * w * w * TailSecondMoment(n, r);
  c.a[1][0] = 1.0;
  c.a[1][n] = 2.0 / (1.0 - r);
  c.b[0] = problem.sigma * problem.sigma -
           (problem.kind == DomainKind::kContinuous ? w * w / 12.0 : 0.0);
  c.b[1] = 1.0;
  return c;
}

void RestoreFeasibility(const ConstraintSystem& constraints,
                        std::vector<double>& p) {
  // dp = D^2 A^T (A D^2 A^T)^-1 (b - A p), D = diag(p), solved with the
  // row-scaled system. Two passes absorb the rounding of the first.
  for (int pass = 0; pass < 2; ++pass) {
    const ScaledRows rows = ScaleRows(constraints, p);
    std::array<double, 2> defect{};
    for (int r = 0; r < 2; ++r) {
      defect[r] = (constraints.b[r] - Dot(constraints.a[r], p)) * rows.scale[r];
    }
    const auto lambda = SolveGram(rows.cross, defect);
    for (std::size_t k = 0; k < p.size(); ++k) {
      p[k] += p[k] * (lambda[0] * rows.row[0][k] + lambda[1] * rows.row[1][k]);
    }
  }
}

std::vector<double> ProjectOntoConstraints(const ConstraintSystem& constraints,
                                           std::span<const double> p,
                                           std::span<const double> g) {
  const ScaledRows rows = ScaleRows(constraints, p);
  std::vector<double> out(g.begin(), g.end());
  ProjectInPlace(rows, out);
  ProjectInPlace(rows, out);
  return out;
}

std::vector<double> GaussianShapedMasses(double c_hat, int tail_start,
                                         double tail_ratio, double bin_width) {
  // Upper Gaussian tail 1 - Phi(z), via erfc to keep relative precision.
  auto upper = [](double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); };
  const int n = tail_start;
  const double scale = bin_width / std::sqrt(c_hat);
  std::vector<double> p(n + 1);
  p[0] = std::erf(0.5 * scale / std::sqrt(2.0));
  for (int i = 1; i < n; ++i) {
    p[i] = upper((i - 0.5) * scale) - upper((i + 0.5) * scale);
  }
  p[n] = (1.0 - tail_ratio) * upper((n - 0.5) * scale);
  const double total = NormalizationSum(p, tail_ratio);
  for (double& x : p) x /= total;
  return p;
}

TailedNoiseFamily InitDistribution(const OptimizationProblem& problem,
                                   const SolverSettings& settings) {
  problem.Validate();
  const int n = problem.tail_start;
  const double w = problem.bin_width;
  const double r = problem.tail_ratio;
  const double target = problem.sigma * problem.sigma;
  const DomainKind kind = problem.kind;
  const double min_variance =
      kind == DomainKind::kContinuous ? w * w / 12.0 : 0.0;
  if (!(target > min_variance)) {
    throw Error(ErrorCode::kBisectionFailure,
                "sigma^2 does not exceed the minimum variance of the family");
  }

  std::vector<double> p;
  auto build = [&](double c_hat) {
    p = GaussianShapedMasses(c_hat, n, r, w);
    double interior = 0.0;
    for (int i = 1; i < n; ++i) interior += p[i] * double(i) * double(i);
    return w * w * (2.0 * interior + 2.0 * p[n] * TailSecondMoment(n, r)) +
           min_variance;
  };

  double lo = 0.0;
  double hi = 2.0 * target;
  if (!(build(hi) >= target)) {
    throw Error(ErrorCode::kBisectionFailure,
                "variance bracket [0, 2 sigma^2] does not reach sigma^2; "
                "N * bin width is too small for sigma");
  }
  bool converged = false;
  for (int it = 0; it < settings.bisection_max_iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double var = build(mid);
    if (std::abs(var - target) <= settings.bisection_rel_tol * target) {
      converged = true;
      break;
    }
    (var < target ? lo : hi) = mid;
  }
  if (!converged) {
    throw Error(ErrorCode::kBisectionFailure,
                "variance bisection did not reach the relative tolerance");
  }
  for (int i = 0; i <= n; ++i) {
    if (!(p[i] > 0.0)) {
      throw Error(ErrorCode::kStrictFeasibilityViolation,
                  "initial p[" + std::to_string(i) +
                      "] underflowed to 0; N is too large for sigma / bin "
                      "width");
    }
  }
  RestoreFeasibility(BuildConstraints(problem), p);
  return MakeFamily(std::move(p), r, n, w, kind);
}

DescentResult DescentStep(std::span<const double> p, double tail_ratio,
                          int max_shift, RenyiOrder order,
                          const ConstraintSystem& constraints,
                          const SolverSettings& settings) {
  DescentResult result{std::vector<double>(p.begin(), p.end()), {}};
  StepReport& report = result.report;

  const RenyiObjective current(TailedMasses{p, tail_ratio}, order, max_shift);
  const ObjectiveReport before = current.Max();
  report.log_g_before = before.log_g;
  report.log_g_after = before.log_g;
  report.t_star = before.t_star;
  report.t_star_after = before.t_star;

  // The gradient of log g is that of g divided by g, so the candidate set
  // p (1 - mu g_proj), mu in mu_ub 2^-k, is the same for either.
  const std::vector<double> direction = ProjectOntoConstraints(
      constraints, p, current.PreconditionedLogGradient(before.t_star));
  double mu_ub = std::numeric_limits<double>::infinity();
  for (double d : direction) {
    if (d > 0.0) mu_ub = std::min(mu_ub, 1.0 / d);
  }
  if (!std::isfinite(mu_ub)) return result;  // stationary
  report.mu_upper = mu_ub;

  std::vector<double> candidate(p.size());
  double best = before.log_g;
  for (int k = 0; k <= settings.backtracking_depth; ++k) {
    const double mu = std::ldexp(mu_ub, -k);
    for (std::size_t i = 0; i < p.size(); ++i) {
      candidate[i] = p[i] * (1.0 - mu * direction[i]);
    }
    if (!StrictlyPositive(candidate)) {
      ++report.rejected_nonpositive;
      continue;
    }
    RestoreFeasibility(constraints, candidate);
    if (!StrictlyPositive(candidate)) {
      ++report.rejected_nonpositive;
      continue;
    }
    const ObjectiveReport trial =
        RenyiObjective(TailedMasses{candidate, tail_ratio}, order, max_shift)
            .Max();
    if (std::isfinite(trial.log_g) && trial.log_g < best) {
      best = trial.log_g;
      result.p = candidate;
      report.accepted = true;
      report.mu = mu;
      report.log_g_after = trial.log_g;
      report.t_star_after = trial.t_star;
    }
  }
  return result;
}

double MomentsBound(TailedMasses masses, int max_shift, double alpha,
                    int compositions, double target_delta) {
  const RenyiOrder order(alpha);
  const double log_g = RenyiObjective(masses, order, max_shift).Max().log_g;
  return Gamma(log_g, alpha, compositions, target_delta);
}

RenyiOrder NewtonAlpha(TailedMasses masses, int max_shift, RenyiOrder order,
                       int compositions, double target_delta,
                       const SolverSettings& settings) {
  const double alpha = order.value();
  if (!(alpha > settings.alpha_floor)) return order;
  const double h =
      std::min(settings.fd_step_alpha * alpha, 0.5 * (alpha - 1.0));
  auto gamma = [&](double a) {
    return MomentsBound(masses, max_shift, a, compositions, target_delta);
  };
  const double g0 = gamma(alpha);
  const double gm = gamma(alpha - h);
  const double gp = gamma(alpha + h);
  const double d1 = (gp - gm) / (2.0 * h);
  const double d2 = (gp - 2.0 * g0 + gm) / (h * h);
  if (!(d2 > 0.0) || !std::isfinite(d1)) return order;
  const double next = alpha - d1 / d2;
  if (!std::isfinite(next) || !(next > settings.alpha_floor)) return order;
  const double g_next = gamma(next);
  if (!(g_next <= g0)) return order;
  return RenyiOrder(next);
}

OptimizedNoise Optimize(const OptimizationProblem& problem,
                        const SolverSettings& settings,
                        const TraceCallback& on_record) {
  problem.Validate();
  settings.Validate();
  const TailedNoiseFamily initial = InitDistribution(problem, settings);
  const ConstraintSystem constraints = BuildConstraints(problem);
  const int max_shift = problem.shifts().max_shift();
  const double r = problem.tail_ratio;
  RenyiOrder order = AlphaInit(problem.sigma, problem.sensitivity,
                               problem.target_delta, problem.compositions);
  std::vector<double> p(initial.head().begin(), initial.head().end());

  std::vector<TraceRecord> trace;
  trace.reserve(static_cast<std::size_t>(settings.iterations) + 1);
  auto emit = [&](TraceRecord record) {
    record.alpha = order.value();
    record.rdp = record.log_g / (order.value() - 1.0);
    record.epsilon = Gamma(record.log_g, order.value(), problem.compositions,
                           problem.target_delta);
    record.residual = constraints.Residual(p);
    record.min_mass = *std::min_element(p.begin(), p.end());
    if (on_record) on_record(record);
    trace.push_back(record);
  };

  {
    const ObjectiveReport start =
        RenyiObjective(TailedMasses{p, r}, order, max_shift).Max();
    TraceRecord record;
    record.log_g = start.log_g;
    record.t_star = start.t_star;
    emit(record);
  }

  for (int k = 1; k <= settings.iterations; ++k) {
    DescentResult step =
        DescentStep(p, r, max_shift, order, constraints, settings);
    p = std::move(step.p);
    TraceRecord record;
    record.iteration = k;
    record.mu = step.report.accepted ? step.report.mu : 0.0;
    record.log_g = step.report.log_g_after;
    record.t_star = step.report.t_star_after;
    if (k % settings.alpha_update_period == 0) {
      const RenyiOrder next =
          NewtonAlpha(TailedMasses{p, r}, max_shift, order,
                      problem.compositions, problem.target_delta, settings);
      if (next.value() != order.value()) {
        order = next;
        record.alpha_updated = true;
        const ObjectiveReport moved =
            RenyiObjective(TailedMasses{p, r}, order, max_shift).Max();
        record.log_g = moved.log_g;
        record.t_star = moved.t_star;
      }
    }
    emit(record);
  }

  return OptimizedNoise{MakeFamily(std::move(p), r, problem.tail_start,
                                   problem.bin_width, problem.kind),
                        order, std::move(trace)};
}

}  // namespace rdpnoise
