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

// Brute-force reference for the Renyi objective. Deliberately shares nothing
// with rdp_objective.cc beyond MassAt.

#include <cmath>
#include <string>

#include "rdpnoise/error.h"
#include "rdpnoise/noise_family.h"
#include "rdpnoise/rdp_objective.h"

namespace rdpnoise {
namespace {

constexpr long double kRemainderBound = 1e-12L;

// Sum of the terms beyond [-N - t - m, N + t + m] on both sides. Far right
// terms equal p_N r^(i - N - (1 - a) t), far left terms
// p_N r^(|i| - N + (1 - a) t); both decay with ratio r.
long double Remainder(const TailedNoiseFamily& family, int t, long double a,
                      std::int64_t m) {
  const long double r = family.tail_ratio();
  const long double pn = family.head().back();
  const long double n = family.tail_start();
  const long double right =
      pn * std::pow(r, n + t + m + 1 - n - (1 - a) * t) / (1 - r);
  const long double left =
      pn * std::pow(r, n + t + m + 1 - n + (1 - a) * t) / (1 - r);
  return right + left;
}

}  // namespace

std::int64_t BruteTailTermsFor(const TailedNoiseFamily& family, int t,
                               RenyiOrder order) {
  std::int64_t m = 16;
  while (Remainder(family, t, order.value(), m) > kRemainderBound / 4) {
    m *= 2;
    if (m > (std::int64_t{1} << 34)) {
      throw Error(ErrorCode::kDivergentTail,
                  "no feasible truncation for the brute-force objective");
    }
  }
  return m;
}

double GBrute(const TailedNoiseFamily& family, int t, RenyiOrder order,
              std::int64_t tail_terms) {
  const long double a = order.value();
  const long double remainder = Remainder(family, t, a, tail_terms);
  if (!(remainder <= kRemainderBound)) {
    throw Error(ErrorCode::kDivergentTail,
                "geometric remainder " + std::to_string(double(remainder)) +
                    " exceeds 1e-12; increase tail_terms");
  }
  const std::int64_t reach = family.tail_start() + t + tail_terms;
  long double sum = 0.0L;
  for (std::int64_t i = -reach; i <= reach; ++i) {
    const long double num = MassAt(family, i);
    const long double den = MassAt(family, i - t);
    if (num == 0.0L && den == 0.0L) continue;
    sum += std::pow(num, a) * std::pow(den, 1.0L - a);
  }
  return static_cast<double>(sum);
}

}  // namespace rdpnoise
