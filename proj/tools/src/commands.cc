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

#include "rdpnoise_tools/commands.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rdpnoise/baselines.h"
#include "rdpnoise/family_io.h"
#include "rdpnoise/optimizer.h"
#include "rdpnoise_tools/bench.h"
#include "rdpnoise_tools/calibrate.h"

namespace rdpnoise::tools {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// The winner map requires a relative margin of this size before crediting
// the optimized noise.
constexpr double kWinMargin = 0.02;

std::string OutPath(const RunConfig& config, const std::string& name) {
  std::filesystem::create_directories(config.out);
  return (std::filesystem::path(config.out) / name).string();
}

FamilyMetadata MetadataFor(const RunConfig& config, double final_alpha) {
  FamilyMetadata m;
  m.sigma = config.problem.sigma;
  m.sensitivity = config.problem.sensitivity;
  m.target_delta = config.problem.target_delta;
  m.compositions = config.problem.compositions;
  m.final_alpha = final_alpha;
  m.config_hash = ConfigHash(config);
  return m;
}

TailedNoiseFamily OptimizedFamily(const RunConfig& config,
                                  const OptimizationProblem& problem) {
  return Optimize(problem, config.solver).family;
}

PrivacyCurve CurveFor(const RunConfig& config, const TailedNoiseFamily& family,
                      const std::string& mechanism) {
  const auto& p = config.problem;
  PrivacyCurve curve =
      config.curve.epsilons.empty()
          ? AccountFamily(family, p.sensitivity, p.compositions,
                          config.curve.deltas, config.accountant)
          : AccountFamilyDeltas(family, p.sensitivity, p.compositions,
                                config.curve.epsilons, config.accountant);
  curve.provenance.mechanism = mechanism;
  return curve;
}

}  // namespace

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParseError:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kRangeViolation:
    case ErrorCode::kDomainViolation:
    case ErrorCode::kNormalizationViolation:
    case ErrorCode::kInvalidOrder:
    case ErrorCode::kIngestError:
      return kExitValidation;
    default:
      return kExitCompute;
  }
}

std::string CsvPreamble(const RunConfig& config) {
  return "# schema_version=" + std::to_string(kSchemaVersion) +
         " config_hash=" + ConfigHash(config) + "\n";
}

void WriteFileAtomically(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << contents;
    if (!out.flush()) {
      throw Error(ErrorCode::kInvalidArgument, "cannot write " + tmp);
    }
  }
  std::filesystem::rename(tmp, path);
}

TailedNoiseFamily MechanismFamily(const std::string& id,
                                  const OptimizationProblem& problem) {
  const Mechanism mech = ParseMechanism(id);
  if (mech == Mechanism::kGaussian || mech == Mechanism::kLaplace) {
    return BaselineFamily(mech, problem.sigma, problem.bin_width,
                          problem.tail_start);
  }
  const int n = static_cast<int>(std::ceil(12.0 * problem.sigma)) + 20;
  return BaselineFamily(mech, problem.sigma, 1.0, n);
}

std::string HeatmapWinner(const HeatmapCell& cell) {
  const std::pair<const char*, double> alternatives[] = {
      {"gaussian", cell.eps_gauss},
      {"laplace", cell.eps_laplace},
      {"dgauss", cell.eps_dgauss},
      {"dlaplace", cell.eps_dlaplace}};
  const char* best_id = nullptr;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [id, eps] : alternatives) {
    if (!std::isnan(eps) && eps < best) {
      best = eps;
      best_id = id;
    }
  }
  if (std::isnan(cell.eps_rdp)) return best_id ? best_id : "none";
  if (best_id == nullptr || cell.eps_rdp <= (1.0 - kWinMargin) * best) {
    return "rdp";
  }
  return best_id;
}

HeatmapCell ComputeHeatmapCell(const RunConfig& config, double sigma,
                               int compositions) {
  OptimizationProblem problem = config.problem;
  problem.sigma = sigma;
  problem.compositions = compositions;
  problem.Validate();
  auto eps = [&](const TailedNoiseFamily& family) {
    return AccountedEpsilon(family, problem.sensitivity, compositions,
                            problem.target_delta, config.accountant);
  };
  HeatmapCell cell{sigma, compositions, kNaN, kNaN, kNaN, kNaN, kNaN, ""};
  cell.eps_rdp = eps(OptimizedFamily(config, problem));
  cell.eps_gauss = eps(MechanismFamily("gaussian", problem));
  cell.eps_laplace = eps(MechanismFamily("laplace", problem));
  // Integer-valued mechanisms only compete on a discrete domain.
  if (problem.kind == DomainKind::kDiscrete) {
    cell.eps_dgauss = eps(MechanismFamily("dgauss", problem));
    cell.eps_dlaplace = eps(MechanismFamily("dlaplace", problem));
  }
  cell.winner = HeatmapWinner(cell);
  return cell;
}

std::vector<PrivacyCurve> ComputeCurves(const RunConfig& config,
                                        std::ostream& log) {
  const auto& p = config.problem;
  if (config.curve.deltas.empty() && config.curve.epsilons.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "curve grid is empty");
  }
  TailedNoiseFamily rdp_family =
      config.curve.distribution.empty()
          ? OptimizedFamily(config, p)
          : [&] {
              std::ifstream in(config.curve.distribution);
              if (!in) {
                throw Error(ErrorCode::kInvalidArgument,
                            "cannot read " + config.curve.distribution);
              }
              std::stringstream text;
              text << in.rdbuf();
              return DeserializeFamily(text.str()).family;
            }();
  std::vector<PrivacyCurve> curves;
  curves.push_back(CurveFor(config, rdp_family, "rdp"));
  for (const auto& id : config.mechanisms) {
    curves.push_back(CurveFor(config, MechanismFamily(id, p), id));
    log << "curve " << id << " done\n";
  }
  if (config.curve.pointwise_min) {
    if (config.curve.deltas.empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "pointwise-min mode needs a delta grid");
    }
    PrivacyCurve envelope = curves.front();
    envelope.provenance.mechanism = "rdp_envelope";
    for (std::size_t j = 0; j < config.curve.deltas.size(); ++j) {
      OptimizationProblem at = p;
      at.target_delta = config.curve.deltas[j];
      const double eps =
          AccountedEpsilon(OptimizedFamily(config, at), p.sensitivity,
                           p.compositions, at.target_delta, config.accountant);
      // The envelope also covers the single-delta distribution.
      for (auto& point : envelope.points) {
        if (point.delta == at.target_delta) {
          point.epsilon = std::min(point.epsilon, eps);
        }
      }
      log << "envelope delta=" << at.target_delta << " eps=" << eps << "\n";
    }
    curves.push_back(std::move(envelope));
  }
  return curves;
}

int CmdOptimize(const RunConfig& config, std::ostream& log) {
  config.Validate();
  std::ostringstream trace;
  trace << nlohmann::json{{"schema_version", kSchemaVersion},
                          {"config_hash", ConfigHash(config)}}
               .dump()
        << "\n";
  const OptimizedNoise result =
      Optimize(config.problem, config.solver, [&](const TraceRecord& r) {
        trace << FormatTraceRecord(r) << "\n";
      });
  const double final_alpha = result.final_alpha.value();
  WriteFileAtomically(
      OutPath(config, "distribution.json"),
      SerializeFamily(result.family, MetadataFor(config, final_alpha)));
  WriteFileAtomically(OutPath(config, "trace.jsonl"), trace.str());
  std::ostringstream masses;
  masses << CsvPreamble(config);
  WriteMassCsv(result.family, masses);
  WriteFileAtomically(OutPath(config, "masses.csv"), masses.str());

  const auto& p = config.problem;
  const double eps = AccountedEpsilon(result.family, p.sensitivity,
                                      p.compositions, p.target_delta,
                                      config.accountant);
  log << "final alpha " << final_alpha << ", accounted epsilon " << eps
      << " at delta " << p.target_delta << "\n";
  return kExitOk;
}

int CmdCurve(const RunConfig& config, std::ostream& log) {
  config.Validate();
  const auto curves = ComputeCurves(config, log);
  std::ostringstream out;
  out << CsvPreamble(config);
  WriteCurveCsv(curves, out);
  WriteFileAtomically(OutPath(config, "curves.csv"), out.str());
  return kExitOk;
}

int CmdHeatmap(const RunConfig& config, std::ostream& log) {
  config.Validate();
  if (config.heatmap.sigmas.empty() || config.heatmap.compositions.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "heatmap grid is empty");
  }
  std::ostringstream out;
  out << CsvPreamble(config);
  out << "sigma,compositions,eps_rdp,eps_gauss,eps_laplace,eps_dgauss,"
         "eps_dlaplace,winner\n";
  out << std::setprecision(10);
  for (const double sigma : config.heatmap.sigmas) {
    for (const int nc : config.heatmap.compositions) {
      HeatmapCell cell;
      try {
        cell = ComputeHeatmapCell(config, sigma, nc);
      } catch (const Error& e) {
        cell = HeatmapCell{sigma, nc, kNaN, kNaN, kNaN, kNaN, kNaN,
                           "error:" + std::string(ErrorCodeName(e.code()))};
        log << "cell sigma=" << sigma << " compositions=" << nc << ": "
            << e.what() << "\n";
      }
      out << cell.sigma << ',' << cell.compositions << ',' << cell.eps_rdp
          << ',' << cell.eps_gauss << ',' << cell.eps_laplace << ','
          << cell.eps_dgauss << ',' << cell.eps_dlaplace << ',' << cell.winner
          << '\n';
      log << "cell sigma=" << sigma << " compositions=" << nc << " -> "
          << cell.winner << "\n";
    }
  }
  WriteFileAtomically(OutPath(config, "heatmap.csv"), out.str());
  return kExitOk;
}

int CmdBench(const RunConfig& config, std::ostream& log) {
  config.Validate();
  BenchRunner runner(config);
  const auto rows = runner.RunAll();
  std::ostringstream out;
  out << CsvPreamble(config);
  // Open point of the protocol: per-query MSEs are averaged with equal
  // weight regardless of each feature's clipped range.
  out << "# query_weighting=equal query_sensitivity=1/n\n";
  WriteBenchCsv(rows, out);
  WriteFileAtomically(OutPath(config, "bench.csv"), out.str());
  for (const auto& row : rows) {
    log << row.dataset << " eps=" << row.epsilon << " " << row.mechanism
        << " improvement " << row.improvement_pct << "% (seed std "
        << row.improvement_std << ")\n";
  }
  return kExitOk;
}

int CmdCalibrate(const RunConfig& config, const std::string& mechanism,
                 double target_epsilon, const std::string& accountant,
                 std::ostream& out) {
  config.Validate();
  if (!(target_epsilon > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "target epsilon must be > 0");
  }
  SigmaCalibrator calibrator(config.bench.calibration, config.solver,
                             config.accountant);
  const CalibrationTarget target{mechanism, target_epsilon,
                                 config.problem.target_delta,
                                 config.problem.compositions, accountant};
  const double sigma = calibrator.Calibrate(target);
  out << std::setprecision(10) << sigma * config.problem.sensitivity << "\n";
  return kExitOk;
}

}  // namespace rdpnoise::tools
