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

#include "rdpnoise/rdp_objective.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rdpnoise/error.h"

namespace rdpnoise {
namespace {

// Plain powers are safe below this order when no mass is tiny.
constexpr double kPlainPowerMaxAlpha = 8.0;
constexpr double kPlainPowerMinMass = 1e-30;
// A scaled middle sum smaller than this may have lost terms to underflow, so
// the evaluator recomputes it in log space.
constexpr double kScaledSumFloor = 1e-200;

double LogAddExp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

}  // namespace

RenyiOrder::RenyiOrder(double alpha) : alpha_(alpha) {
  if (!(alpha > 1.0) || !std::isfinite(alpha)) {
    throw Error(ErrorCode::kInvalidOrder,
                "Renyi order must be finite and > 1, got " +
                    std::to_string(alpha));
  }
}

ShiftSet ShiftSet::Create(double sensitivity, double bin_width) {
  if (!(sensitivity > 0.0) || !(bin_width > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "sensitivity and bin width must be positive");
  }
  const double ratio = sensitivity / bin_width;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * rounded) {
    throw Error(ErrorCode::kInvalidArgument,
                "sensitivity / bin width must be a positive integer, got " +
                    std::to_string(ratio));
  }
  return ShiftSet(sensitivity, bin_width, static_cast<int>(rounded));
}

double ObjectiveReport::g_value() const { return std::exp(log_g); }

RenyiObjective::RenyiObjective(TailedMasses masses, RenyiOrder order,
                               int max_shift)
    : n_(static_cast<int>(masses.p.size()) - 1),
      max_shift_(max_shift),
      alpha_(order.value()),
      log_r_(std::log(masses.r)) {
  if (n_ < 1) {
    throw Error(ErrorCode::kInvalidArgument, "need at least p_0 and p_1");
  }
  if (max_shift < 0) {
    throw Error(ErrorCode::kInvalidArgument, "max shift must be >= 0");
  }
  double min_mass = 1.0;
  for (std::size_t i = 0; i < masses.p.size(); ++i) {
    if (!(masses.p[i] > 0.0)) {
      throw Error(ErrorCode::kStrictFeasibilityViolation,
                  "p[" + std::to_string(i) +
                      "] is not strictly positive; the divergence is infinite");
    }
    min_mass = std::min(min_mass, masses.p[i]);
  }
  log_p_tail_anchor_ = std::log(masses.p[n_]);

  const int reach = n_ + max_shift_;
  const std::size_t size = 2 * static_cast<std::size_t>(reach) + 1;
  log_u_.resize(size);
  log_v_.resize(size);
  std::vector<double> log_p(masses.p.size());
  for (std::size_t i = 0; i < log_p.size(); ++i) log_p[i] = std::log(masses.p[i]);
  for (int k = -reach; k <= reach; ++k) {
    const int a = k < 0 ? -k : k;
    const double lp = a <= n_ ? log_p[a] : log_p[n_] + (a - n_) * log_r_;
    log_u_[k + reach] = alpha_ * lp;
    log_v_[k + reach] = (1.0 - alpha_) * lp;
  }
  if (alpha_ > kPlainPowerMaxAlpha || min_mass < kPlainPowerMinMass) {
    // Terms behave like P(j) (P(j + t) / P(j))^alpha, so their scale is set
    // by the largest mass. Split that scale between the two factors so that
    // their exponent ranges are centred; if they still overflow, Evaluate
    // falls back to log space.
    const double max_u = *std::max_element(log_u_.begin(), log_u_.end());
    const double max_v = *std::max_element(log_v_.begin(), log_v_.end());
    const double max_log_p = *std::max_element(log_p.begin(), log_p.end());
    shift_u_ = 0.5 * (max_u - max_v + max_log_p);
    shift_v_ = max_log_p - shift_u_;
  }
  u_.resize(size);
  v_.resize(size);
  for (std::size_t k = 0; k < size; ++k) {
    u_[k] = std::exp(log_u_[k] - shift_u_);
    v_[k] = std::exp(log_v_[k] - shift_v_);
  }
}

double RenyiObjective::LogTailPair(int t) const {
  // p_N r / (1 - r) * (r^((1 - alpha) t) + r^(alpha t))
  return log_p_tail_anchor_ + log_r_ - std::log1p(-std::exp(log_r_)) +
         LogAddExp((1.0 - alpha_) * t * log_r_, alpha_ * t * log_r_);
}

struct RenyiObjective::Terms {
  double log_g = 0.0;
  double log_middle = 0.0;
  bool scaled = true;  // false when the log-space fallback was used
};

RenyiObjective::Terms RenyiObjective::Evaluate(int t) const {
  if (t < 0 || t > max_shift_) {
    throw Error(ErrorCode::kInvalidArgument,
                "shift " + std::to_string(t) + " outside [0, " +
                    std::to_string(max_shift_) + "]");
  }
  const int reach = n_ + max_shift_;
  // Middle terms j in [-N - t, N]: P(t + j)^alpha P(j)^(1 - alpha).
  const double* u = u_.data() + reach + t;
  const double* v = v_.data() + reach;
  double sum = 0.0;
  for (int j = -n_ - t; j <= n_; ++j) sum += u[j] * v[j];

  Terms terms;
  if (std::isfinite(sum) && sum >= kScaledSumFloor) {
    terms.log_middle = std::log(sum) + shift_u_ + shift_v_;
  } else {
    terms.scaled = false;
    const double* lu = log_u_.data() + reach + t;
    const double* lv = log_v_.data() + reach;
    double hi = -std::numeric_limits<double>::infinity();
    for (int j = -n_ - t; j <= n_; ++j) hi = std::max(hi, lu[j] + lv[j]);
    double acc = 0.0;
    for (int j = -n_ - t; j <= n_; ++j) acc += std::exp(lu[j] + lv[j] - hi);
    terms.log_middle = hi + std::log(acc);
  }
  terms.log_g = LogAddExp(terms.log_middle, LogTailPair(t));
  return terms;
}

double RenyiObjective::LogG(int t) const { return Evaluate(t).log_g; }

ObjectiveReport RenyiObjective::Max() const {
  if (max_shift_ < 1) {
    throw Error(ErrorCode::kInvalidArgument, "empty shift set");
  }
  ObjectiveReport report;
  report.log_g = -std::numeric_limits<double>::infinity();
  for (int t = 1; t <= max_shift_; ++t) {
    const double value = LogG(t);
    if (value > report.log_g) {
      report.log_g = value;
      report.t_star = t;
    }
  }
  report.rdp = report.log_g / (alpha_ - 1.0);
  return report;
}

std::vector<double> RenyiObjective::PreconditionedLogGradient(int t) const {
  const Terms terms = Evaluate(t);
  const int reach = n_ + max_shift_;
  std::vector<double> grad(static_cast<std::size_t>(n_) + 1, 0.0);
  auto head = [this](int k) { return std::min(k < 0 ? -k : k, n_); };

  // Each middle term's share of g, credited to the stored probabilities its
  // two factors depend on (tail bins depend on p_N).
  if (terms.scaled) {
    const double scale = std::exp(shift_u_ + shift_v_ - terms.log_g);
    const double* u = u_.data() + reach + t;
    const double* v = v_.data() + reach;
    for (int j = -n_ - t; j <= n_; ++j) {
      const double w = u[j] * v[j] * scale;
      grad[head(t + j)] += alpha_ * w;
      grad[head(j)] += (1.0 - alpha_) * w;
    }
  } else {
    const double* lu = log_u_.data() + reach + t;
    const double* lv = log_v_.data() + reach;
    for (int j = -n_ - t; j <= n_; ++j) {
      const double w = std::exp(lu[j] + lv[j] - terms.log_g);
      grad[head(t + j)] += alpha_ * w;
      grad[head(j)] += (1.0 - alpha_) * w;
    }
  }
  // The far-tail pair is proportional to p_N.
  grad[n_] += std::exp(LogTailPair(t) - terms.log_g);
  return grad;
}

namespace {

RenyiObjective ObjectiveFor(const TailedNoiseFamily& family, int max_shift,
                            RenyiOrder order) {
  return RenyiObjective(TailedMasses{family.head(), family.tail_ratio()}, order,
                        max_shift);
}

}  // namespace

double LogGShift(const TailedNoiseFamily& family, int t, RenyiOrder order) {
  return ObjectiveFor(family, t, order).LogG(t);
}

double GShift(const TailedNoiseFamily& family, int t, RenyiOrder order) {
  return std::exp(LogGShift(family, t, order));
}

ObjectiveReport GMax(const TailedNoiseFamily& family, const ShiftSet& shifts,
                     RenyiOrder order) {
  if (std::abs(shifts.bin_width() - family.bin_width()) >
      1e-12 * family.bin_width()) {
    throw Error(ErrorCode::kInvalidArgument,
                "shift set bin width does not match the family");
  }
  return ObjectiveFor(family, shifts.max_shift(), order).Max();
}

std::vector<double> GradG(const TailedNoiseFamily& family, int t,
                          RenyiOrder order) {
  const RenyiObjective objective = ObjectiveFor(family, t, order);
  const double g = std::exp(objective.LogG(t));
  std::vector<double> grad = objective.PreconditionedLogGradient(t);
  const auto p = family.head();
  for (std::size_t k = 0; k < grad.size(); ++k) grad[k] *= g / p[k];
  return grad;
}

}  // namespace rdpnoise
