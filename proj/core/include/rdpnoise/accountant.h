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


// Privacy accounting: the moments-accountant conversion from RDP to
// (epsilon, delta), and a pessimistic privacy-loss-distribution (PLD)
// accountant for tailed noise families.
//
// The PLD of a family P against its shift T_t P is the law of
// log(P(i) / P(i - t)) under i ~ P. Losses are rounded up to a uniform grid,
// composed by FFT convolution, and queried through the hockey-stick
//
//   delta(eps) = inf_mass + sum_{l > eps} m_l (1 - e^(eps - l)).

#ifndef RDPNOISE_ACCOUNTANT_H_
#define RDPNOISE_ACCOUNTANT_H_

#include <cstdint>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "rdpnoise/noise_family.h"

namespace rdpnoise {

struct AlphaBracket {
  double lo = 1.0 + 1e-4;
  double hi = 1e4;
  int grid_points = 400;  // log-spaced in alpha - 1
};

struct MomentsResult {
  double epsilon = 0.0;
  double alpha = 0.0;
};

// eps = min_alpha N_c gamma(alpha) + log(1/delta) / (alpha - 1). Throws
// kSearchFailure when the minimizer sits on an end of the bracket.
MomentsResult MomentsEpsilon(const std::function<double(double)>& rdp,
                             double target_delta, int compositions,
                             const AlphaBracket& bracket = {});

// Moments accountant on a family, with gamma from the worst shift in
// {1, ..., sensitivity / bin_width}.
MomentsResult FamilyMomentsEpsilon(const TailedNoiseFamily& family,
                                   double sensitivity, double target_delta,
                                   int compositions,
                                   const AlphaBracket& bracket = {});

// Loss of masses[k] is (offset + k) * width.
class PrivacyLossDistribution {
 public:
  PrivacyLossDistribution(double width, std::int64_t offset,
                          std::vector<double> masses, double inf_mass,
                          bool pessimistic);

  double width() const { return width_; }
  std::int64_t offset() const { return offset_; }
  std::span<const double> masses() const { return masses_; }
  double inf_mass() const { return inf_mass_; }
  bool pessimistic() const { return pessimistic_; }

  std::size_t size() const { return masses_.size(); }
  double loss(std::size_t k) const {
    return static_cast<double>(offset_ + static_cast<std::int64_t>(k)) *
           width_;
  }
  double TotalMass() const;  // finite masses plus inf_mass
  double MeanLoss() const;   // over the finite part

 private:
  double width_;
  std::int64_t offset_;
  std::vector<double> masses_;
  double inf_mass_;
  bool pessimistic_;
};

// Exact losses rounded to the grid: up when pessimistic, down otherwise. The
// geometric tails carry constant losses t log(1/r) (left) and t log r (right)
// with masses summed in closed form, so no truncation is involved.
PrivacyLossDistribution PldFromFamily(const TailedNoiseFamily& family, int t,
                                      double grid_width,
                                      bool pessimistic = true);

struct ComposeSettings {
  std::size_t max_grid_points = std::size_t{1} << 24;
  // Mass below this at either end is trimmed after each convolution: the
  // low end merges into the next kept point, the high end moves to inf_mass.
  double trim_mass = 1e-15;
};

// Throws kGridOverflow when the composed support exceeds max_grid_points.
PrivacyLossDistribution PldSelfCompose(const PrivacyLossDistribution& pld,
                                       int compositions,
                                       const ComposeSettings& settings = {});

double DeltaForEpsilon(const PrivacyLossDistribution& pld, double epsilon);

// Smallest eps >= 0 with delta(eps) <= target. Throws kUnattainable if the
// target is below inf_mass.
double EpsilonForDelta(const PrivacyLossDistribution& pld, double target_delta);

// sum_i (P(i) - e^eps P(i - t))_+ with the tails in closed form.
double ExactSingleDelta(const TailedNoiseFamily& family, int t,
                        double epsilon);

struct CurvePoint {
  double epsilon = 0.0;
  double delta = 0.0;
};

struct CurveProvenance {
  std::string mechanism;
  std::string accountant;
  int compositions = 1;
  double sigma = 0.0;
  double sensitivity = 1.0;
  double grid_width = 0.0;
  bool pessimistic = true;
};

struct PrivacyCurve {
  std::vector<CurvePoint> points;  // increasing epsilon
  CurveProvenance provenance;
};

struct AccountSettings {
  double grid_width = 5e-3;
  // Halve the grid until successive epsilons differ by less than this.
  bool refine = true;
  double refine_tol = 1e-3;
  int max_refinements = 6;
  ComposeSettings compose;
};

// Worst-shift epsilon for each delta: for every t in
// {1, ..., sensitivity / bin_width} the shift-t PLD is composed with itself
// and the largest epsilon over t is reported. Deltas below the composed
// inf_mass give +inf.
PrivacyCurve AccountFamily(const TailedNoiseFamily& family, double sensitivity,
                           int compositions, std::span<const double> deltas,
                           const AccountSettings& settings = {});

// As AccountFamily, for a list of epsilons (largest delta over t).
PrivacyCurve AccountFamilyDeltas(const TailedNoiseFamily& family,
                                 double sensitivity, int compositions,
                                 std::span<const double> epsilons,
                                 const AccountSettings& settings = {});

// Single-delta convenience.
double AccountedEpsilon(const TailedNoiseFamily& family, double sensitivity,
                        int compositions, double target_delta,
                        const AccountSettings& settings = {});

// CSV with header epsilon,delta,mechanism,accountant,compositions,sigma,
// sensitivity; rows sorted by epsilon within each curve, curves in order.
void WriteCurveCsv(std::span<const PrivacyCurve> curves, std::ostream& out);
void WriteCurveCsv(const PrivacyCurve& curve, std::ostream& out);

}  // namespace rdpnoise

#endif  // RDPNOISE_ACCOUNTANT_H_
