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


// Noise calibration: find the standard deviation at which a mechanism's
// accounted epsilon hits a target.

#ifndef RDPNOISE_TOOLS_CALIBRATE_H_
#define RDPNOISE_TOOLS_CALIBRATE_H_

#include <map>
#include <memory>
#include <string>
#include <tuple>

#include "rdpnoise/accountant.h"
#include "rdpnoise/noise_family.h"
#include "rdpnoise/optimizer.h"
#include "rdpnoise_tools/config.h"

namespace rdpnoise::tools {

struct CalibrationTarget {
  std::string mechanism;  // "rdp" or a baseline id
  double epsilon = 1.0;
  double delta = 1e-6;
  int compositions = 1;
  // "pld" (privacy loss distribution) or "moments".
  std::string accountant = "pld";
};

// Works in units of the sensitivity (s = 1); by scale invariance the
// calibrated sigma for sensitivity s is s times the returned value.
class SigmaCalibrator {
 public:
  SigmaCalibrator(CalibrationBlock block, SolverSettings solver,
                  AccountSettings accountant);

  // Accounted epsilon of the mechanism at standard deviation sigma. For
  // "rdp" this runs the optimizer; results are cached by sigma rounded to
  // 4 decimals.
  double EpsilonAt(const CalibrationTarget& target, double sigma);

  // Bisection on log sigma until |eps(sigma) - target| <= tolerance. Throws
  // kCalibrationFailure if the bracket does not straddle the target.
  double Calibrate(const CalibrationTarget& target);

  // Noise family behind the "rdp" evaluation at sigma (from the cache), in
  // units where the sensitivity is ProbeSensitivity(target).
  const TailedNoiseFamily& OptimizedAt(const CalibrationTarget& target,
                                       double sigma);

  double ProbeSensitivity(const CalibrationTarget& target);
  int optimizer_runs() const { return optimizer_runs_; }

 private:
  struct Entry {
    std::unique_ptr<TailedNoiseFamily> family;
    double epsilon;
  };
  Entry& Optimized(const CalibrationTarget& target, double sigma);
  double AccountFor(const CalibrationTarget& target,
                    const TailedNoiseFamily& family, double sensitivity) const;
  OptimizationProblem ProblemAt(const CalibrationTarget& target,
                                double sigma);

  CalibrationBlock block_;
  SolverSettings solver_;
  AccountSettings accountant_;
  std::map<std::tuple<long long, double, int, std::string>, Entry> cache_;
  std::map<std::tuple<double, double, int, std::string>, double> probe_s_;
  int optimizer_runs_ = 0;
};

}  // namespace rdpnoise::tools

#endif  // RDPNOISE_TOOLS_CALIBRATE_H_
