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


// Mean-query benchmark: per-feature means released with calibrated noise,
// scored by mean squared error against the non-private value.

#ifndef RDPNOISE_TOOLS_BENCH_H_
#define RDPNOISE_TOOLS_BENCH_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rdpnoise_tools/calibrate.h"
#include "rdpnoise_tools/config.h"

namespace rdpnoise::tools {

// Column-major numeric table.
struct Dataset {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns[0].size(); }
};

// Header row plus numeric rows. Throws kIngestError with the line number on
// a malformed row.
Dataset ReadCsvDataset(std::istream& in, const std::string& name);
Dataset LoadCsvDataset(const std::string& path, const std::string& name);

// Columns drawn from Beta(a_j, b_j) with per-column shapes in [0.5, 5].
Dataset SyntheticDataset(const std::string& name, int rows, int columns,
                         std::uint64_t seed);

Dataset MaterializeDataset(const DatasetSpec& spec);

// Maps each column affinely so its 5th and 95th percentiles land on 0 and 1,
// then clips to [0, 1]. Constant columns become 0.
void PercentileRescale(Dataset& data);

struct BenchRow {
  std::string dataset;
  double epsilon = 0.0;
  std::string mechanism;
  double sigma = 0.0;  // calibrated, in data units
  double mse_mean = 0.0;
  double mse_std = 0.0;
  double improvement_pct = 0.0;  // versus the Gaussian row
  double improvement_std = 0.0;  // across seeds, percentage points
};

class BenchRunner {
 public:
  BenchRunner(const RunConfig& config);

  // Calibrated sigma for unit sensitivity; cached per (mechanism, epsilon).
  double UnitSigma(const std::string& mechanism, double epsilon);

  std::vector<BenchRow> Run(const Dataset& data, double epsilon);
  std::vector<BenchRow> RunAll();

 private:
  // Per-seed MSE averaged over queries.
  std::vector<double> SeedMses(const Dataset& data, const std::string& mech,
                               double epsilon, double sensitivity);

  const RunConfig& config_;
  SigmaCalibrator calibrator_;
  std::vector<std::tuple<std::string, double, double>> sigma_cache_;
};

void WriteBenchCsv(const std::vector<BenchRow>& rows, std::ostream& out);

}  // namespace rdpnoise::tools

#endif  // RDPNOISE_TOOLS_BENCH_H_
