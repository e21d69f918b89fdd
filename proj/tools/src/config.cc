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

#include "rdpnoise_tools/config.h"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rdpnoise/baselines.h"
#include "rdpnoise/error.h"

namespace rdpnoise::tools {
namespace {

using nlohmann::json;

[[noreturn]] void Fail(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::kParseError, "config field '" + field + "': " + what);
}

// Reads members of one JSON object, rejecting unknown keys so that typos do
// not silently fall back to defaults.
class Reader {
 public:
  Reader(const json& object, std::string path)
      : object_(object), path_(std::move(path)) {
    if (!object_.is_object()) Fail(Name(""), "expected an object");
  }
  void Done() const {
    for (const auto& [key, value] : object_.items()) {
      if (!seen_.count(key)) Fail(Name(key), "unknown field");
    }
  }

  template <typename T>
  void Get(const char* key, T& out) {
    seen_.insert(key);
    const auto it = object_.find(key);
    if (it == object_.end()) return;
    try {
      out = it->get<T>();
    } catch (const json::exception& e) {
      Fail(Name(key), e.what());
    }
  }

  const json* Child(const char* key) {
    seen_.insert(key);
    const auto it = object_.find(key);
    return it == object_.end() ? nullptr : &*it;
  }

  std::string Name(const std::string& key) const {
    return path_.empty() ? key : key.empty() ? path_ : path_ + "." + key;
  }

 private:
  const json& object_;
  std::string path_;
  std::set<std::string> seen_;
};

void ReadProblem(const json& j, OptimizationProblem& p) {
  Reader r(j, "problem");
  r.Get("delta", p.target_delta);
  r.Get("compositions", p.compositions);
  r.Get("sigma", p.sigma);
  r.Get("sensitivity", p.sensitivity);
  std::string type(DomainKindName(p.kind));
  r.Get("type", type);
  try {
    p.kind = ParseDomainKind(type);
  } catch (const Error& e) {
    Fail("problem.type", e.what());
  }
  r.Get("bin_width", p.bin_width);
  r.Get("tail_start", p.tail_start);
  r.Get("tail_rate", p.tail_ratio);
  r.Done();
}

void ReadSolver(const json& j, SolverSettings& s) {
  Reader r(j, "solver");
  r.Get("iterations", s.iterations);
  r.Get("alpha_period", s.alpha_update_period);
  r.Get("backtracking_depth", s.backtracking_depth);
  r.Get("bisection_rel_tol", s.bisection_rel_tol);
  r.Get("bisection_max_iterations", s.bisection_max_iterations);
  r.Get("alpha_floor", s.alpha_floor);
  r.Get("fd_step_alpha", s.fd_step_alpha);
  r.Done();
}

void ReadCalibration(const json& j, CalibrationBlock& c) {
  Reader r(j, "bench.calibration");
  r.Get("bin_width", c.bin_width);
  r.Get("tail_start", c.tail_start);
  r.Get("tail_rate", c.tail_ratio);
  r.Get("head_sigmas", c.head_sigmas);
  r.Get("iterations", c.iterations);
  r.Get("sigma_lo", c.sigma_lo);
  r.Get("sigma_hi", c.sigma_hi);
  r.Get("tolerance", c.tolerance);
  r.Get("max_probes", c.max_probes);
  r.Done();
}

void ReadBench(const json& j, BenchBlock& b) {
  Reader r(j, "bench");
  if (const json* datasets = r.Child("datasets")) {
    if (!datasets->is_array()) Fail("bench.datasets", "expected an array");
    b.datasets.clear();
    for (std::size_t i = 0; i < datasets->size(); ++i) {
      DatasetSpec d;
      Reader dr((*datasets)[i], "bench.datasets[" + std::to_string(i) + "]");
      dr.Get("name", d.name);
      dr.Get("path", d.path);
      dr.Get("rows", d.rows);
      dr.Get("columns", d.columns);
      dr.Get("seed", d.seed);
      dr.Done();
      b.datasets.push_back(std::move(d));
    }
  }
  r.Get("queries", b.queries);
  r.Get("draws", b.draws);
  r.Get("seeds", b.seeds);
  r.Get("epsilons", b.epsilons);
  r.Get("mechanisms", b.mechanisms);
  if (const json* c = r.Child("calibration")) ReadCalibration(*c, b.calibration);
  r.Done();
}

json ToJson(const RunConfig& c) {
  const auto& p = c.problem;
  const auto& s = c.solver;
  json datasets = json::array();
  for (const auto& d : c.bench.datasets) {
    datasets.push_back({{"name", d.name},
                        {"path", d.path},
                        {"rows", d.rows},
                        {"columns", d.columns},
                        {"seed", d.seed}});
  }
  const auto& cal = c.bench.calibration;
  return json{
      {"problem",
       {{"delta", p.target_delta},
        {"compositions", p.compositions},
        {"sigma", p.sigma},
        {"sensitivity", p.sensitivity},
        {"type", std::string(DomainKindName(p.kind))},
        {"bin_width", p.bin_width},
        {"tail_start", p.tail_start},
        {"tail_rate", p.tail_ratio}}},
      {"solver",
       {{"iterations", s.iterations},
        {"alpha_period", s.alpha_update_period},
        {"backtracking_depth", s.backtracking_depth},
        {"bisection_rel_tol", s.bisection_rel_tol},
        {"bisection_max_iterations", s.bisection_max_iterations},
        {"alpha_floor", s.alpha_floor},
        {"fd_step_alpha", s.fd_step_alpha}}},
      {"out", c.out},
      {"mechanisms", c.mechanisms},
      {"curve",
       {{"deltas", c.curve.deltas},
        {"epsilons", c.curve.epsilons},
        {"pointwise_min", c.curve.pointwise_min},
        {"distribution", c.curve.distribution}}},
      {"heatmap",
       {{"sigmas", c.heatmap.sigmas},
        {"compositions", c.heatmap.compositions}}},
      {"accountant",
       {{"grid_width", c.accountant.grid_width},
        {"refine", c.accountant.refine},
        {"refine_tol", c.accountant.refine_tol},
        {"max_refinements", c.accountant.max_refinements}}},
      {"bench",
       {{"datasets", datasets},
        {"queries", c.bench.queries},
        {"draws", c.bench.draws},
        {"seeds", c.bench.seeds},
        {"epsilons", c.bench.epsilons},
        {"mechanisms", c.bench.mechanisms},
        {"calibration",
         {{"bin_width", cal.bin_width},
          {"tail_start", cal.tail_start},
          {"tail_rate", cal.tail_ratio},
          {"head_sigmas", cal.head_sigmas},
          {"iterations", cal.iterations},
          {"sigma_lo", cal.sigma_lo},
          {"sigma_hi", cal.sigma_hi},
          {"tolerance", cal.tolerance},
          {"max_probes", cal.max_probes}}}}}};
}

void CheckMechanisms(const std::vector<std::string>& ids, const char* field,
                     bool allow_rdp) {
  for (const auto& id : ids) {
    if (allow_rdp && id == "rdp") continue;
    try {
      ParseMechanism(id);
    } catch (const Error&) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string(field) + ": unknown mechanism '" + id + "'");
    }
  }
}

}  // namespace

void RunConfig::Validate() const {
  problem.Validate();
  solver.Validate();
  if (out.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "output directory is empty");
  }
  CheckMechanisms(mechanisms, "mechanisms", false);
  CheckMechanisms(bench.mechanisms, "bench.mechanisms", true);
  if (!(accountant.grid_width > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "accountant grid width <= 0");
  }
  for (double d : curve.deltas) {
    if (!(d > 0.0 && d < 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "curve deltas must be in (0,1)");
    }
  }
  if (bench.draws < 1 || bench.queries < 1 || bench.seeds.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "bench needs draws >= 1, queries >= 1 and a seed");
  }
  const auto& cal = bench.calibration;
  if (!(cal.sigma_lo > 0.0 && cal.sigma_hi > cal.sigma_lo) ||
      !(cal.tolerance > 0.0) || cal.iterations < 0 || !(cal.head_sigmas > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid calibration block");
  }
}

RunConfig DefaultConfig() {
  RunConfig c;
  c.problem.target_delta = 1e-6;
  c.problem.compositions = 10;
  c.problem.sigma = 8.0;
  c.problem.sensitivity = 1.0;
  c.problem.kind = DomainKind::kContinuous;
  c.problem.bin_width = 0.01;
  c.problem.tail_start = 8000;
  c.problem.tail_ratio = 0.9999;
  for (int e = -12; e <= -1; ++e) c.curve.deltas.push_back(std::pow(10.0, e));
  c.heatmap.sigmas = {2.0, 4.0, 8.0};
  c.heatmap.compositions = {1, 10, 100};
  c.bench.datasets = {{"breast_cancer", "", 569, 30, 569},
                      {"diabetes", "", 442, 10, 442},
                      {"heart_disease", "", 303, 13, 303}};
  return c;
}

RunConfig ParseConfig(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    const std::size_t at = std::min<std::size_t>(e.byte, json_text.size());
    const auto line =
        1 + std::count(json_text.begin(), json_text.begin() + at, '\n');
    throw Error(ErrorCode::kParseError,
                "config line " + std::to_string(line) + ": " + e.what());
  }
  RunConfig c = DefaultConfig();
  Reader r(doc, "");
  if (const json* j = r.Child("problem")) ReadProblem(*j, c.problem);
  if (const json* j = r.Child("solver")) ReadSolver(*j, c.solver);
  r.Get("out", c.out);
  r.Get("mechanisms", c.mechanisms);
  if (const json* j = r.Child("curve")) {
    Reader cr(*j, "curve");
    cr.Get("deltas", c.curve.deltas);
    cr.Get("epsilons", c.curve.epsilons);
    cr.Get("pointwise_min", c.curve.pointwise_min);
    cr.Get("distribution", c.curve.distribution);
    cr.Done();
  }
  if (const json* j = r.Child("heatmap")) {
    Reader hr(*j, "heatmap");
    hr.Get("sigmas", c.heatmap.sigmas);
    hr.Get("compositions", c.heatmap.compositions);
    hr.Done();
  }
  if (const json* j = r.Child("accountant")) {
    Reader ar(*j, "accountant");
    ar.Get("grid_width", c.accountant.grid_width);
    ar.Get("refine", c.accountant.refine);
    ar.Get("refine_tol", c.accountant.refine_tol);
    ar.Get("max_refinements", c.accountant.max_refinements);
    ar.Done();
  }
  if (const json* j = r.Child("bench")) ReadBench(*j, c.bench);
  r.Done();
  return c;
}

RunConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kInvalidArgument, "cannot read config " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseConfig(buffer.str());
}

std::string CanonicalJson(const RunConfig& config) {
  return ToJson(config).dump();  // nlohmann objects keep keys sorted
}

std::string ConfigHash(const RunConfig& config) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : CanonicalJson(config)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

}  // namespace rdpnoise::tools
