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


// Baseline mechanisms: closed forms where they exist, and embeddings into the
// tailed family so that every mechanism is accounted by the same code.

#ifndef RDPNOISE_BASELINES_H_
#define RDPNOISE_BASELINES_H_

#include <functional>
#include <string_view>

#include "rdpnoise/noise_family.h"
#include "rdpnoise/rdp_objective.h"

namespace rdpnoise {

enum class Mechanism { kGaussian, kLaplace, kDiscreteGaussian, kDiscreteLaplace };

// "gaussian", "laplace", "dgauss", "dlaplace".
std::string_view MechanismId(Mechanism mechanism);
Mechanism ParseMechanism(std::string_view id);  // throws kParseError

// s^2 alpha / (2 sigma^2).
double GaussianRdp(double sigma, double sensitivity, RenyiOrder order);

// Exact privacy curve of the Gaussian mechanism,
// Phi(s / (2 sigma) - eps sigma / s) - e^eps Phi(-s / (2 sigma) - eps sigma / s).
// N_c-fold composition is the same curve at sigma / sqrt(N_c).
double GaussianDelta(double sigma, double sensitivity, double epsilon);
double GaussianEpsilon(double sigma, double sensitivity, double target_delta);

// Bin masses of a symmetric density by adaptive Gauss-Kronrod quadrature, with
// p_N = (1 - r) * (mass beyond (N - 1/2) w), renormalized to a valid family.
// `upper_tail(x)` is the mass beyond x >= 0; when empty it is integrated.
// Throws kQuadratureFailure.
TailedNoiseFamily EmbedDensity(const std::function<double(double)>& pdf,
                               double bin_width, int tail_start, double r,
                               const std::function<double(double)>& upper_tail =
                                   {});

// Density ratio between bins N + 1 and N, the continuation of the true tail.
double GaussianTailRatio(double sigma, double bin_width, int tail_start);
double LaplaceTailRatio(double scale, double bin_width);

TailedNoiseFamily EmbedGaussian(double sigma, double bin_width, int tail_start,
                                double r);
TailedNoiseFamily EmbedLaplace(double scale, double bin_width, int tail_start,
                               double r);

// PMF proportional to e^(-i^2 / (2 sigma^2)) on the integers.
TailedNoiseFamily DiscreteGaussianFamily(double sigma, int tail_start,
                                         double r);
double DiscreteGaussianTailRatio(double sigma, int tail_start);
// PMF (e^(1/t) - 1) / (e^(1/t) + 1) e^(-|i| / t); r = e^(-1/t) is exact.
TailedNoiseFamily DiscreteLaplaceFamily(double scale, int tail_start, double r);
double DiscreteLaplaceVariance(double scale);

// RDP of the Laplace mechanism, from g_max on its embedding.
double LaplaceRdpNumeric(double scale, double sensitivity, RenyiOrder order,
                         double bin_width, int tail_start);

// Embedding of `mechanism` with standard deviation sigma. Continuous
// mechanisms use the given grid; discrete ones use bin width 1 and tail start
// `tail_start`. Tail ratios follow each density's own tail.
TailedNoiseFamily BaselineFamily(Mechanism mechanism, double sigma,
                                 double bin_width, int tail_start);

}  // namespace rdpnoise

#endif  // RDPNOISE_BASELINES_H_
