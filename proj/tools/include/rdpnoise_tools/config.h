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


// Run configuration for the command-line tools. A config is one JSON
// document; command-line flags override individual fields after loading.

#ifndef RDPNOISE_TOOLS_CONFIG_H_
#define RDPNOISE_TOOLS_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rdpnoise/accountant.h"
#include "rdpnoise/optimizer.h"

namespace rdpnoise::tools {

struct CurveBlock {
  std::vector<double> deltas;
  std::vector<double> epsilons;  // used instead of deltas when non-empty
  bool pointwise_min = false;
  std::string distribution;  // optimized family to load; empty = optimize
};

struct HeatmapBlock {
  std::vector<double> sigmas;
  std::vector<int> compositions;
};

struct DatasetSpec {
  std::string name;
  std::string path;  // CSV file; empty = synthetic
  int rows = 0;
  int columns = 0;
  std::uint64_t seed = 0;
};

// Resolution used by calibration probes that re-run the optimizer.
struct CalibrationBlock {
  double bin_width = 0.02;
  int tail_start = 4000;
  double tail_ratio = 0.9999;
  // Probes run at a sensitivity of a whole number of bins, picked so that
  // the head spans about this many Gaussian-calibrated deviations.
  double head_sigmas = 10.0;
  int iterations = 1500;
  double sigma_lo = 1.0;  // bracket in units of the sensitivity
  double sigma_hi = 200.0;
  double tolerance = 1e-3;
  int max_probes = 60;
};

struct BenchBlock {
  std::vector<DatasetSpec> datasets;
  int queries = 10;
  int draws = 100000;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::vector<double> epsilons = {0.62, 1.05};
  std::vector<std::string> mechanisms = {"gaussian", "rdp"};
  CalibrationBlock calibration;
};

struct RunConfig {
  OptimizationProblem problem;
  SolverSettings solver;
  std::string out = "out";
  std::vector<std::string> mechanisms = {"gaussian", "laplace"};
  CurveBlock curve;
  HeatmapBlock heatmap;
  AccountSettings accountant;
  BenchBlock bench;

  // Throws rdpnoise::Error(kInvalidArgument) on an invalid combination.
  void Validate() const;
};

// Defaults: the settings of the large worked example in the README.
RunConfig DefaultConfig();

// Throws kParseError naming the offending field.
RunConfig ParseConfig(std::string_view json_text);
RunConfig LoadConfig(const std::string& path);

// Canonical JSON of every resolved field (keys sorted).
std::string CanonicalJson(const RunConfig& config);
// 64-bit FNV-1a of the canonical JSON, as 16 hex digits.
std::string ConfigHash(const RunConfig& config);

}  // namespace rdpnoise::tools

#endif  // RDPNOISE_TOOLS_CONFIG_H_
