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


// Shared helpers for the unit tests.

#ifndef RDPNOISE_TESTS_TEST_UTIL_H_
#define RDPNOISE_TESTS_TEST_UTIL_H_

#include <functional>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "rdpnoise/error.h"
#include "rdpnoise/noise_family.h"

namespace rdpnoise {

inline void ExpectCode(ErrorCode code, const std::function<void()>& fn) {
  try {
    fn();
    ADD_FAILURE() << "expected " << ErrorCodeName(code) << ", nothing thrown";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

// Random strictly positive family with N = n: log-uniform head masses,
// rescaled to satisfy normalization exactly.
inline TailedNoiseFamily RandomFamily(std::mt19937_64& rng, int n, double r,
                                      double bin_width = 1.0,
                                      DomainKind kind = DomainKind::kDiscrete) {
  std::uniform_real_distribution<double> log_mass(-6.0, 0.0);
  std::vector<double> p(n + 1);
  for (double& x : p) x = std::pow(10.0, log_mass(rng));
  const double total = NormalizationSum(p, r);
  for (double& x : p) x /= total;
  return MakeFamily(std::move(p), r, n, bin_width, kind);
}

}  // namespace rdpnoise

#endif  // RDPNOISE_TESTS_TEST_UTIL_H_
