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

#include "rdpnoise/noise_family.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rdpnoise/error.h"

namespace rdpnoise {
namespace {

constexpr double kTailTruncation = 1e-12;

std::string Lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

// Index of the stored probability that bin i depends on.
std::size_t HeadIndex(std::int64_t i, int tail_start) {
  const std::int64_t a = i < 0 ? -i : i;
  return static_cast<std::size_t>(std::min<std::int64_t>(a, tail_start));
}

// (1/w) * integral of c over bin i.
double BinAveragedCost(const std::function<double(double)>& cost,
                       std::int64_t i, double w) {
  const double lo = (static_cast<double>(i) - 0.5) * w;
  const double hi = (static_cast<double>(i) + 0.5) * w;
  double error = 0.0;
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 21>::integrate(
          cost, lo, hi, 10, 1e-13, &error);
  return integral / w;
}

}  // namespace

std::string_view DomainKindName(DomainKind kind) {
  return kind == DomainKind::kContinuous ? "continuous" : "discrete";
}

DomainKind ParseDomainKind(std::string_view name) {
  const std::string lower = Lower(name);
  if (lower == "continuous") return DomainKind::kContinuous;
  if (lower == "discrete") return DomainKind::kDiscrete;
  throw Error(ErrorCode::kParseError,
              "unknown domain kind '" + std::string(name) + "'");
}

double TailedNoiseFamily::tail_mass() const {
  return 2.0 * p_.back() / (1.0 - r_);
}

double NormalizationSum(std::span<const double> p, double r) {
  const std::size_t n = p.size() - 1;
  double interior = 0.0;
  for (std::size_t j = 1; j < n; ++j) interior += p[j];
  return p[0] + 2.0 * interior + 2.0 * p[n] / (1.0 - r);
}

double TailSecondMoment(int tail_start, double r) {
  // sum_k r^k (N + k)^2 = N^2 S0 + 2 N S1 + S2 with the standard geometric
  // moment sums; equal to the (r^2 (N-1)^2 + N^2 (1 - 2r) + r (2N + 1)) /
  // (1 - r)^3 form but free of the cancellation that form suffers as r -> 1.
  const double n = tail_start;
  const double q = 1.0 - r;
  return n * n / q + 2.0 * n * r / (q * q) + r * (1.0 + r) / (q * q * q);
}

TailedNoiseFamily MakeFamily(std::vector<double> p, double r, int tail_start,
                             double bin_width, DomainKind kind) {
  if (tail_start < 1) {
    throw Error(ErrorCode::kRangeViolation, "tail start N must be >= 1");
  }
  if (p.size() != static_cast<std::size_t>(tail_start) + 1) {
    throw Error(ErrorCode::kRangeViolation,
                "expected N + 1 = " + std::to_string(tail_start + 1) +
                    " probabilities, got " + std::to_string(p.size()));
  }
  if (!(r > 0.0 && r < 1.0)) {
    throw Error(ErrorCode::kRangeViolation,
                "tail ratio must lie in (0, 1), got " + std::to_string(r));
  }
  if (!(bin_width > 0.0) || !std::isfinite(bin_width)) {
    throw Error(ErrorCode::kRangeViolation, "bin width must be positive");
  }
  if (kind == DomainKind::kDiscrete && bin_width != 1.0) {
    throw Error(ErrorCode::kDomainViolation,
                "discrete families require bin width 1, got " +
                    std::to_string(bin_width));
  }
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 0.0 && p[i] <= 1.0)) {
      throw Error(ErrorCode::kRangeViolation,
                  "p[" + std::to_string(i) + "] = " + std::to_string(p[i]) +
                      " lies outside [0, 1]");
    }
  }
  const double residual = std::abs(NormalizationSum(p, r) - 1.0);
  if (!(residual <= kNormalizationTolerance)) {
    throw Error(ErrorCode::kNormalizationViolation,
                "normalization residual " + std::to_string(residual) +
                    " exceeds tolerance");
  }
  return TailedNoiseFamily(std::move(p), r, bin_width, kind);
}

double MassAt(const TailedNoiseFamily& family, std::int64_t i) {
  const int n = family.tail_start();
  const std::int64_t a = i < 0 ? -i : i;
  const double anchor = family.head()[HeadIndex(i, n)];
  if (a <= n) return anchor;
  return anchor * std::pow(family.tail_ratio(), static_cast<double>(a - n));
}

double DensityAt(const TailedNoiseFamily& family, double z) {
  if (family.kind() != DomainKind::kContinuous) {
    throw Error(ErrorCode::kDomainViolation,
                "density is only defined for continuous families");
  }
  const double w = family.bin_width();
  // Bin i covers ((i - 1/2) w, (i + 1/2) w); ceil(x - 1/2) sends the
  // breakpoint (i + 1/2) w to bin i, the bin on its left.
  const auto i = static_cast<std::int64_t>(std::ceil(z / w - 0.5));
  return MassAt(family, i) / w;
}

CostSpec CostSpec::Quadratic(double budget) {
  return CostSpec{Shape::kQuadratic, [](double z) { return z * z; }, budget};
}

CostSpec CostSpec::Custom(std::function<double(double)> cost, double budget) {
  return CostSpec{Shape::kCustom, std::move(cost), budget};
}

double Variance(const TailedNoiseFamily& family) {
  const auto p = family.head();
  const int n = family.tail_start();
  const double w = family.bin_width();
  double interior = 0.0;
  for (int i = 1; i < n; ++i) {
    interior += p[i] * static_cast<double>(i) * static_cast<double>(i);
  }
  double var = 2.0 * interior +
               2.0 * p[n] * TailSecondMoment(n, family.tail_ratio());
  var *= w * w;
  if (family.kind() == DomainKind::kContinuous) var += w * w / 12.0;
  return var;
}

double ExpectedCost(const TailedNoiseFamily& family, const CostSpec& spec,
                    std::int64_t max_tail_terms) {
  if (spec.shape == CostSpec::Shape::kQuadratic) return Variance(family);

  const auto p = family.head();
  const int n = family.tail_start();
  const double w = family.bin_width();
  const double r = family.tail_ratio();
  const bool continuous = family.kind() == DomainKind::kContinuous;
  auto bin_cost = [&](std::int64_t i) {
    return continuous ? BinAveragedCost(spec.cost, i, w)
                      : spec.cost(static_cast<double>(i));
  };

  double total = p[0] * bin_cost(0);
  for (int i = 1; i < n; ++i) total += 2.0 * p[i] * bin_cost(i);

  // Tail: 2 p_N sum_{i >= N} r^(i - N) A_i, stopped once the remaining terms
  // are bounded by a geometric envelope below the truncation threshold.
  double tail = 0.0;
  double weight = 1.0;
  double previous = -1.0;
  for (std::int64_t k = 0; k < max_tail_terms; ++k) {
    const double term = weight * bin_cost(n + k);
    tail += term;
    if (previous > 0.0 && term > 0.0) {
      const double ratio = term / previous;
      if (ratio < 1.0 &&
          2.0 * p[n] * term * ratio / (1.0 - ratio) < kTailTruncation) {
        return total + 2.0 * p[n] * tail;
      }
    } else if (previous == 0.0 && term == 0.0 && weight < kTailTruncation) {
      return total + 2.0 * p[n] * tail;
    }
    previous = term;
    weight *= r;
  }
  throw Error(ErrorCode::kDivergentTail,
              "expected-cost tail series did not reach the truncation bound "
              "within " + std::to_string(max_tail_terms) + " terms");
}

std::vector<double> Sample(const TailedNoiseFamily& family, std::uint64_t seed,
                           std::size_t n) {
  std::vector<double> out;
  if (n == 0) return out;
  out.reserve(n);

  const auto p = family.head();
  const int tail_start = family.tail_start();
  const double r = family.tail_ratio();
  // Magnitude categories: |i| = 0, 1, ..., N - 1, and the tail |i| >= N.
  std::vector<double> weights(p.size());
  weights[0] = p[0];
  for (int i = 1; i < tail_start; ++i) weights[i] = 2.0 * p[i];
  weights[tail_start] = 2.0 * p[tail_start] / (1.0 - r);

  std::mt19937_64 rng(seed);
  std::discrete_distribution<int> magnitude(weights.begin(), weights.end());
  std::geometric_distribution<std::int64_t> tail_offset(1.0 - r);
  std::bernoulli_distribution negative(0.5);
  std::uniform_real_distribution<double> within(-0.5, 0.5);
  const bool continuous = family.kind() == DomainKind::kContinuous;
  const double w = family.bin_width();

  for (std::size_t k = 0; k < n; ++k) {
    std::int64_t index = magnitude(rng);
    if (index == tail_start) index += tail_offset(rng);
    if (index != 0 && negative(rng)) index = -index;
    double value = static_cast<double>(index);
    if (continuous) value = (value + within(rng)) * w;
    out.push_back(value);
  }
  return out;
}

}  // namespace rdpnoise
