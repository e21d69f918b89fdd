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

#include "rdpnoise_tools/bench.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <numeric>
#include <random>
#include <sstream>

#include "rdpnoise/baselines.h"
#include "rdpnoise/error.h"
#include "rdpnoise/noise_family.h"

namespace rdpnoise::tools {
namespace {

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double Percentile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double Mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double SampleStd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = Mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::uint64_t DrawSeed(std::uint64_t seed, const std::string& dataset,
                       std::size_t query, const std::string& mechanism) {
  const auto h1 = static_cast<std::uint32_t>(std::hash<std::string>{}(dataset));
  const auto h2 = static_cast<std::uint32_t>(std::hash<std::string>{}(mechanism));
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32), h1, h2,
                    static_cast<std::uint32_t>(query)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (std::uint64_t{out[0]} << 32) | out[1];
}

}  // namespace

Dataset ReadCsvDataset(std::istream& in, const std::string& name) {
  Dataset data;
  data.name = name;
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::kIngestError, name + ": missing header row");
  }
  data.header = SplitCsvLine(line);
  data.columns.resize(data.header.size());
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = SplitCsvLine(line);
    if (cells.size() != data.header.size()) {
      throw Error(ErrorCode::kIngestError,
                  name + " line " + std::to_string(line_no) + ": expected " +
                      std::to_string(data.header.size()) + " cells, got " +
                      std::to_string(cells.size()));
    }
    for (std::size_t j = 0; j < cells.size(); ++j) {
      std::size_t used = 0;
      double value = 0.0;
      try {
        value = std::stod(cells[j], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != cells[j].size() || !std::isfinite(value)) {
        throw Error(ErrorCode::kIngestError,
                    name + " line " + std::to_string(line_no) + ", column '" +
                        data.header[j] + "': not a finite number: '" +
                        cells[j] + "'");
      }
      data.columns[j].push_back(value);
    }
  }
  if (data.rows() == 0) {
    throw Error(ErrorCode::kIngestError, name + ": no data rows");
  }
  return data;
}

Dataset LoadCsvDataset(const std::string& path, const std::string& name) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIngestError, "cannot open " + path);
  return ReadCsvDataset(in, name);
}

Dataset SyntheticDataset(const std::string& name, int rows, int columns,
                         std::uint64_t seed) {
  if (rows < 1 || columns < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                name + ": synthetic data needs positive rows and columns");
  }
  Dataset data;
  data.name = name;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> shape(0.5, 5.0);
  for (int j = 0; j < columns; ++j) {
    data.header.push_back("x" + std::to_string(j));
    std::gamma_distribution<double> ga(shape(rng), 1.0);
    std::gamma_distribution<double> gb(shape(rng), 1.0);
    std::vector<double> column(rows);
    for (double& x : column) {
      const double a = ga(rng);
      x = a / (a + gb(rng));
    }
    data.columns.push_back(std::move(column));
  }
  return data;
}

Dataset MaterializeDataset(const DatasetSpec& spec) {
  if (!spec.path.empty()) return LoadCsvDataset(spec.path, spec.name);
  return SyntheticDataset(spec.name, spec.rows, spec.columns, spec.seed);
}

void PercentileRescale(Dataset& data) {
  for (auto& column : data.columns) {
    const double lo = Percentile(column, 0.05);
    const double hi = Percentile(column, 0.95);
    for (double& x : column) {
      x = hi > lo ? std::clamp((x - lo) / (hi - lo), 0.0, 1.0) : 0.0;
    }
  }
}

BenchRunner::BenchRunner(const RunConfig& config)
    : config_(config),
      calibrator_(config.bench.calibration, config.solver, config.accountant) {}

double BenchRunner::UnitSigma(const std::string& mechanism, double epsilon) {
  for (const auto& [m, e, s] : sigma_cache_) {
    if (m == mechanism && e == epsilon) return s;
  }
  CalibrationTarget target{mechanism, epsilon, config_.problem.target_delta,
                           config_.bench.queries};
  const double sigma = calibrator_.Calibrate(target);
  sigma_cache_.emplace_back(mechanism, epsilon, sigma);
  return sigma;
}

std::vector<double> BenchRunner::SeedMses(const Dataset& data,
                                          const std::string& mech,
                                          double epsilon, double sensitivity) {
  const double unit_sigma = UnitSigma(mech, epsilon);
  const double sigma = unit_sigma * sensitivity;
  const TailedNoiseFamily* family = nullptr;
  if (mech == "rdp") {
    family = &calibrator_.OptimizedAt(
        CalibrationTarget{mech, epsilon, config_.problem.target_delta,
                          config_.bench.queries},
        unit_sigma);
  } else if (mech != "gaussian" && mech != "laplace") {
    throw Error(ErrorCode::kInvalidArgument,
                "bench mechanism '" + mech +
                    "' is not defined for real-valued mean queries");
  }

  const auto draws = static_cast<std::size_t>(config_.bench.draws);
  const auto queries = static_cast<std::size_t>(config_.bench.queries);
  std::vector<double> per_seed;
  for (const std::uint64_t seed : config_.bench.seeds) {
    double total = 0.0;
    for (std::size_t q = 0; q < queries; ++q) {
      const auto& column = data.columns[q];
      const double truth = Mean(column);
      const std::uint64_t s = DrawSeed(seed, data.name, q, mech);
      std::vector<double> noise;
      if (family != nullptr) {
        noise = Sample(*family, s, draws);
        const double scale =
            sensitivity / calibrator_.ProbeSensitivity(CalibrationTarget{
                              mech, epsilon, config_.problem.target_delta,
                              config_.bench.queries});
        for (double& z : noise) z *= scale;
      } else {
        std::mt19937_64 rng(s);
        noise.resize(draws);
        if (mech == "gaussian") {
          std::normal_distribution<double> normal(0.0, sigma);
          for (double& z : noise) z = normal(rng);
        } else {
          std::exponential_distribution<double> expo(std::sqrt(2.0) / sigma);
          for (double& z : noise) z = expo(rng) - expo(rng);
        }
      }
      double se = 0.0;
      for (double z : noise) {
        const double err = (truth + z) - truth;
        se += err * err;
      }
      total += se / static_cast<double>(draws);
    }
    per_seed.push_back(total / static_cast<double>(queries));
  }
  return per_seed;
}

std::vector<BenchRow> BenchRunner::Run(const Dataset& data, double epsilon) {
  if (data.columns.size() < static_cast<std::size_t>(config_.bench.queries)) {
    throw Error(ErrorCode::kInvalidArgument,
                data.name + " has fewer columns than queries");
  }
  // Values lie in [0, 1] after rescaling, so one record moves a mean by at
  // most 1 / n.
  const double sensitivity = 1.0 / static_cast<double>(data.rows());
  const auto gaussian = SeedMses(data, "gaussian", epsilon, sensitivity);
  std::vector<BenchRow> rows;
  for (const std::string& mech : config_.bench.mechanisms) {
    const auto mses = mech == "gaussian"
                          ? gaussian
                          : SeedMses(data, mech, epsilon, sensitivity);
    BenchRow row;
    row.dataset = data.name;
    row.epsilon = epsilon;
    row.mechanism = mech;
    row.sigma = UnitSigma(mech, epsilon) * sensitivity;
    row.mse_mean = Mean(mses);
    row.mse_std = SampleStd(mses);
    row.improvement_pct = 100.0 * (1.0 - row.mse_mean / Mean(gaussian));
    std::vector<double> per_seed(mses.size());
    for (std::size_t k = 0; k < mses.size(); ++k) {
      per_seed[k] = 100.0 * (1.0 - mses[k] / gaussian[k]);
    }
    row.improvement_std = SampleStd(per_seed);
    rows.push_back(row);
  }
  return rows;
}

std::vector<BenchRow> BenchRunner::RunAll() {
  std::vector<BenchRow> rows;
  for (const auto& spec : config_.bench.datasets) {
    Dataset data = MaterializeDataset(spec);
    PercentileRescale(data);
    for (const double eps : config_.bench.epsilons) {
      auto part = Run(data, eps);
      rows.insert(rows.end(), part.begin(), part.end());
    }
  }
  return rows;
}

void WriteBenchCsv(const std::vector<BenchRow>& rows, std::ostream& out) {
  out << "dataset,epsilon,mechanism,mse_mean,mse_std,improvement_pct\n";
  out << std::setprecision(10);
  for (const auto& row : rows) {
    out << row.dataset << ',' << row.epsilon << ',' << row.mechanism << ','
        << row.mse_mean << ',' << row.mse_std << ',' << row.improvement_pct
        << '\n';
  }
}

}  // namespace rdpnoise::tools
