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


// Subcommands of rdpnoise_cli. Each returns a process exit code and writes
// its outputs under config.out; errors propagate as rdpnoise::Error.

#ifndef RDPNOISE_TOOLS_COMMANDS_H_
#define RDPNOISE_TOOLS_COMMANDS_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "rdpnoise/accountant.h"
#include "rdpnoise/error.h"
#include "rdpnoise/noise_family.h"
#include "rdpnoise_tools/config.h"

namespace rdpnoise::tools {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitCompute = 2;

// Bad input (1) versus a failed computation (2).
int ExitCodeFor(ErrorCode code);

// "# schema_version=1 config_hash=<hash>", the first line of every CSV.
std::string CsvPreamble(const RunConfig& config);

// Replaces `path` with `contents` through a temporary file and a rename.
void WriteFileAtomically(const std::string& path, const std::string& contents);

// Embedding of a baseline id at the problem's sigma. Discrete mechanisms use
// bin width 1 and a tail start of ceil(12 sigma) + 20.
TailedNoiseFamily MechanismFamily(const std::string& id,
                                  const OptimizationProblem& problem);

struct HeatmapCell {
  double sigma = 0.0;
  int compositions = 1;
  // NaN where the mechanism is not applicable or failed.
  double eps_rdp, eps_gauss, eps_laplace, eps_dgauss, eps_dlaplace;
  std::string winner;
};

// "rdp" iff eps_rdp <= 0.98 * best alternative, else the best alternative's
// id. Pure function of the epsilon columns.
std::string HeatmapWinner(const HeatmapCell& cell);

HeatmapCell ComputeHeatmapCell(const RunConfig& config, double sigma,
                               int compositions);

std::vector<PrivacyCurve> ComputeCurves(const RunConfig& config,
                                        std::ostream& log);

int CmdOptimize(const RunConfig& config, std::ostream& log);
int CmdCurve(const RunConfig& config, std::ostream& log);
int CmdHeatmap(const RunConfig& config, std::ostream& log);
int CmdBench(const RunConfig& config, std::ostream& log);
// Prints the calibrated sigma (in units of the problem's sensitivity).
int CmdCalibrate(const RunConfig& config, const std::string& mechanism,
                 double target_epsilon, const std::string& accountant,
                 std::ostream& out);

}  // namespace rdpnoise::tools

#endif  // RDPNOISE_TOOLS_COMMANDS_H_
