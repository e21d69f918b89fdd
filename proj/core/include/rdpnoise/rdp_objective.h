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

// Renyi objective of a tailed noise family against its shifted copy.
//
// For a family P and an integer bin shift t, the objective is
//
//   g_alpha(P, t) = sum_i P(i)^alpha P(i - t)^(1 - alpha),
//
// the quantity inside the logarithm of D_alpha(P || T_t P). The evaluator
// below sums it in closed form: the two far geometric tails collapse to
// p_N r / (1 - r) (r^((1 - alpha) t) + r^(alpha t)), the remaining
// j in [-N - t, N] terms are summed explicitly.
//
// g itself overflows a double in the large-alpha regime (e.g. alpha ~ 125),
// so the evaluator works with log g throughout. Minimizing log g is the same
// problem and the preconditioned descent direction is only rescaled.

#ifndef RDPNOISE_RDP_OBJECTIVE_H_
#define RDPNOISE_RDP_OBJECTIVE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "rdpnoise/noise_family.h"

namespace rdpnoise {

// Renyi order alpha > 1. alpha == 1 (the KL limit) is rejected.
class RenyiOrder {
 public:
  // Throws kInvalidOrder unless alpha > 1 and finite.
  explicit RenyiOrder(double alpha);
  double value() const { return alpha_; }

 private:
  double alpha_;
};

// Shifts {1, ..., s / w} in bins. s / w must be an integer.
class ShiftSet {
 public:
  // Throws kInvalidArgument if s / w is not (numerically) a positive integer.
  static ShiftSet Create(double sensitivity, double bin_width);

  double sensitivity() const { return sensitivity_; }
  double bin_width() const { return bin_width_; }
  int max_shift() const { return max_shift_; }

 private:
  ShiftSet(double s, double w, int m)
      : sensitivity_(s), bin_width_(w), max_shift_(m) {}
  double sensitivity_;
  double bin_width_;
  int max_shift_;
};

struct ObjectiveReport {
  double log_g = 0.0;  // log of the maximal g over the shift set
  int t_star = 1;      // smallest maximizing shift
  double rdp = 0.0;    // log_g / (alpha - 1)

  double g_value() const;  // exp(log_g); may be +inf for extreme orders
};

// Non-owning view of p_0..p_N and r, used by the optimizer on raw iterates.
struct TailedMasses {
  std::span<const double> p;
  double r;
};

// Precomputes per-order tables for one probability vector so that the scan
// over shifts, and the gradient at the worst shift, share the work.
class RenyiObjective {
 public:
  // Throws kStrictFeasibilityViolation if any p_i <= 0.
  RenyiObjective(TailedMasses masses, RenyiOrder order, int max_shift);

  // log g_alpha(p, t) for 0 <= t <= max_shift (t == 0 gives log of the
  // normalization sum, i.e. 0 for a normalized family).
  double LogG(int t) const;

  // Maximum over t in {1, ..., max_shift}; ties go to the smallest t.
  ObjectiveReport Max() const;

  // p_k * d(log g(p, t)) / d p_k for k = 0..N, i.e. the gradient of log g
  // after the diag(p) change of variables. The entries sum to 1.
  std::vector<double> PreconditionedLogGradient(int t) const;

  double alpha() const { return alpha_; }
  int max_shift() const { return max_shift_; }

 private:
  struct Terms;
  Terms Evaluate(int t) const;
  double LogTailPair(int t) const;

  int n_;
  int max_shift_;
  double alpha_;
  double log_r_;
  double log_p_tail_anchor_;
  // Scaled powers P(k)^alpha e^-shift_u and P(k)^(1 - alpha) e^-shift_v for
  // k in [-N - max_shift, N + max_shift], and their logarithms for the
  // overflow-safe path.
  std::vector<double> u_, v_, log_u_, log_v_;
  double shift_u_ = 0.0;
  double shift_v_ = 0.0;
};

// Convenience wrappers over RenyiObjective.
double LogGShift(const TailedNoiseFamily& family, int t, RenyiOrder order);
double GShift(const TailedNoiseFamily& family, int t, RenyiOrder order);
ObjectiveReport GMax(const TailedNoiseFamily& family, const ShiftSet& shifts,
                     RenyiOrder order);
// Raw partial derivatives d g(p, t) / d p_k, k = 0..N.
std::vector<double> GradG(const TailedNoiseFamily& family, int t,
                          RenyiOrder order);

// Reference evaluation by direct enumeration of sum_i P(i)^a P(i - t)^(1 - a)
// over i in [-N - t - tail_terms, N + t + tail_terms], using MassAt and long
// double arithmetic. Independent of the closed form above. Throws
// kDivergentTail if the neglected geometric remainder exceeds 1e-12.
double GBrute(const TailedNoiseFamily& family, int t, RenyiOrder order,
              std::int64_t tail_terms);

// Smallest tail_terms for which GBrute's remainder bound is below 1e-12.
std::int64_t BruteTailTermsFor(const TailedNoiseFamily& family, int t,
                               RenyiOrder order);

}  // namespace rdpnoise

#endif  // RDPNOISE_RDP_OBJECTIVE_H_
