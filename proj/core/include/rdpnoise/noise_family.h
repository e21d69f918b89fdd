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

#ifndef RDPNOISE_NOISE_FAMILY_H_
#define RDPNOISE_NOISE_FAMILY_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace rdpnoise {

enum class DomainKind { kContinuous, kDiscrete };

std::string_view DomainKindName(DomainKind kind);
// Accepts "continuous" / "discrete" (case-insensitive).
DomainKind ParseDomainKind(std::string_view name);

inline constexpr double kNormalizationTolerance = 1e-10;

// Symmetric noise distribution over bins ..., -1, 0, 1, ... whose masses are
// p_0..p_N for |i| <= N and p_N * r^(|i| - N) beyond. Only p_0..p_N are
// stored, so symmetry and the geometric tail shape hold by construction.
//
// In the continuous domain bin i is the open interval ((i - 1/2)w, (i + 1/2)w)
// and carries a constant density p_|i| / w. In the discrete domain w == 1 and
// bin i is the integer i.
//
// Instances are immutable and validated; build them with MakeFamily.
class TailedNoiseFamily {
 public:
  std::span<const double> head() const { return p_; }
  double tail_ratio() const { return r_; }
  int tail_start() const { return static_cast<int>(p_.size()) - 1; }
  double bin_width() const { return bin_width_; }
  DomainKind kind() const { return kind_; }

  // Total probability in |i| >= tail_start(), i.e. 2 p_N / (1 - r).
  double tail_mass() const;

 private:
  friend TailedNoiseFamily MakeFamily(std::vector<double>, double, int, double,
                                      DomainKind);
  TailedNoiseFamily(std::vector<double> p, double r, double bin_width,
                    DomainKind kind)
      : p_(std::move(p)), r_(r), bin_width_(bin_width), kind_(kind) {}

  std::vector<double> p_;
  double r_;
  double bin_width_;
  DomainKind kind_;
};

// Validates and builds a family. `tail_start` is N; `p` must hold N + 1
// entries. Discrete families require bin_width == 1.
// Throws Error with kRangeViolation, kDomainViolation or
// kNormalizationViolation.
TailedNoiseFamily MakeFamily(std::vector<double> p, double r, int tail_start,
                             double bin_width, DomainKind kind);

// p_0 + 2 sum_{1..N-1} p_j + 2 p_N / (1 - r).
double NormalizationSum(std::span<const double> p, double r);

// sum_{i >= N} r^(i - N) i^2, in a cancellation-free form.
double TailSecondMoment(int tail_start, double r);

// Probability of bin i (bin mass for continuous families).
double MassAt(const TailedNoiseFamily& family, std::int64_t i);

// Density at z; breakpoints take the value of the bin on their left.
// Throws kDomainViolation for discrete families.
double DensityAt(const TailedNoiseFamily& family, double z);

// Symmetric nonnegative cost c(z) with budget C. The quadratic cost is
// special-cased so that its tail series is summed in closed form.
struct CostSpec {
  enum class Shape { kQuadratic, kCustom };

  Shape shape = Shape::kQuadratic;
  std::function<double(double)> cost;
  double budget = 0.0;

  static CostSpec Quadratic(double budget);
  static CostSpec Custom(std::function<double(double)> cost, double budget);
};

// E[c(Z)]. For custom costs the tail series is truncated once the geometric
// envelope of the remaining terms drops below 1e-12; kDivergentTail is thrown
// if that does not happen within `max_tail_terms`.
double ExpectedCost(const TailedNoiseFamily& family, const CostSpec& spec,
                    std::int64_t max_tail_terms = 50'000'000);

// Closed-form variance; includes the w^2/12 in-bin term for continuous
// families.
double Variance(const TailedNoiseFamily& family);

// n i.i.d. draws, deterministic in `seed`. Continuous draws are uniform inside
// the sampled bin.
std::vector<double> Sample(const TailedNoiseFamily& family, std::uint64_t seed,
                           std::size_t n);

}  // namespace rdpnoise

#endif  // RDPNOISE_NOISE_FAMILY_H_
