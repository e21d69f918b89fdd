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

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "rdpnoise/error.h"
#include "rdpnoise/noise_family.h"
#include "rdpnoise_tools/commands.h"
#include "rdpnoise_tools/config.h"

namespace {

using rdpnoise::tools::RunConfig;

// Flags named after the optimizer's inputs; each overrides the config.
struct Overrides {
  std::string config_path;
  std::optional<double> delta, sigma, sensitivity, bin_width, tail_rate;
  std::optional<int> compositions, tail_start, iterations, alpha_period;
  std::optional<std::string> type, out;

  void Register(CLI::App& app) {
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--delta", delta, "target delta");
    app.add_option("--compositions", compositions, "number of compositions");
    app.add_option("--sigma", sigma, "noise standard deviation");
    app.add_option("--sensitivity", sensitivity, "query sensitivity");
    app.add_option("--type", type, "continuous or discrete");
    app.add_option("--bin-width", bin_width, "bin width");
    app.add_option("--tail-start", tail_start, "first geometric-tail index N");
    app.add_option("--tail-rate", tail_rate, "geometric tail ratio r");
    app.add_option("--iterations", iterations, "descent iterations");
    app.add_option("--alpha-period", alpha_period, "iterations between alpha updates");
    app.add_option("--out", out, "output directory");
  }

  RunConfig Resolve() const {
    RunConfig c = config_path.empty() ? rdpnoise::tools::DefaultConfig()
                                      : rdpnoise::tools::LoadConfig(config_path);
    if (delta) c.problem.target_delta = *delta;
    if (compositions) c.problem.compositions = *compositions;
    if (sigma) c.problem.sigma = *sigma;
    if (sensitivity) c.problem.sensitivity = *sensitivity;
    if (type) c.problem.kind = rdpnoise::ParseDomainKind(*type);
    if (bin_width) c.problem.bin_width = *bin_width;
    if (tail_start) c.problem.tail_start = *tail_start;
    if (tail_rate) c.problem.tail_ratio = *tail_rate;
    if (iterations) c.solver.iterations = *iterations;
    if (alpha_period) c.solver.alpha_update_period = *alpha_period;
    if (out) c.out = *out;
    return c;
  }
};

}  // namespace

int main(int argc, char** argv) {
  namespace tools = rdpnoise::tools;
  CLI::App app{"Optimized additive noise for Renyi differential privacy"};
  app.require_subcommand(1);

  Overrides flags;
  CLI::App* optimize = app.add_subcommand("optimize", "optimize a noise distribution");
  CLI::App* curve = app.add_subcommand("curve", "privacy curves per mechanism");
  CLI::App* heatmap = app.add_subcommand("heatmap", "winner map over sigma x compositions");
  CLI::App* bench = app.add_subcommand("bench", "mean-query MSE benchmark");
  CLI::App* calibrate = app.add_subcommand("calibrate", "sigma for a target epsilon");
  for (CLI::App* sub : {optimize, curve, heatmap, bench, calibrate}) {
    flags.Register(*sub);
  }
  std::string mechanism = "rdp";
  std::string accountant = "pld";
  double target_epsilon = 1.0;
  calibrate->add_option("--mechanism", mechanism, "rdp or a baseline id");
  calibrate->add_option("--epsilon", target_epsilon, "target epsilon")->required();
  calibrate->add_option("--accountant", accountant, "pld or moments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? tools::kExitOk : tools::kExitValidation;
  }

  try {
    const RunConfig config = flags.Resolve();
    if (*optimize) return tools::CmdOptimize(config, std::cerr);
    if (*curve) return tools::CmdCurve(config, std::cerr);
    if (*heatmap) return tools::CmdHeatmap(config, std::cerr);
    if (*bench) return tools::CmdBench(config, std::cerr);
    return tools::CmdCalibrate(config, mechanism, target_epsilon, accountant,
                               std::cout);
  } catch (const rdpnoise::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return tools::ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return tools::kExitCompute;
  }
}
