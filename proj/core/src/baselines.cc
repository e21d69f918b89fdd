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

#include "rdpnoise/baselines.h"

#include <cmath>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rdpnoise/error.h"

namespace rdpnoise {
namespace {

constexpr double kQuadratureTolerance = 1e-12;

double NormalCdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double Integrate(const std::function<double(double)>& f, double lo, double hi) {
  double error = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
          f, lo, hi, 15, kQuadratureTolerance, &error);
  if (!std::isfinite(value) ||
      error > std::max(kQuadratureTolerance, 1e-8 * std::abs(value))) {
    throw Error(ErrorCode::kQuadratureFailure,
                "bin quadrature on [" + std::to_string(lo) + ", " +
                    std::to_string(hi) + "] did not converge");
  }
  return value;
}

TailedNoiseFamily Renormalized(std::vector<double> p, double r, int n,
                               double bin_width, DomainKind kind) {
  const double total = NormalizationSum(p, r);
  for (double& x : p) x /= total;
  return MakeFamily(std::move(p), r, n, bin_width, kind);
}

// Solves f(x) = target for increasing f on [lo, hi] by bisection.
template <typename F>
double SolveIncreasing(F f, double target, double lo, double hi) {
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::string_view MechanismId(Mechanism mechanism) {
  switch (mechanism) {
    case Mechanism::kGaussian: return "gaussian";
    case Mechanism::kLaplace: return "laplace";
    case Mechanism::kDiscreteGaussian: return "dgauss";
    case Mechanism::kDiscreteLaplace: return "dlaplace";
  }
  return "unknown";
}

Mechanism ParseMechanism(std::string_view id) {
  for (Mechanism m : {Mechanism::kGaussian, Mechanism::kLaplace,
                      Mechanism::kDiscreteGaussian,
                      Mechanism::kDiscreteLaplace}) {
    if (MechanismId(m) == id) return m;
  }
  throw Error(ErrorCode::kParseError,
              "unknown mechanism '" + std::string(id) + "'");
}

double GaussianRdp(double sigma, double sensitivity, RenyiOrder order) {
  if (!(sigma > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "sigma must be positive");
  }
  return sensitivity * sensitivity * order.value() / (2.0 * sigma * sigma);
}

double GaussianDelta(double sigma, double sensitivity, double epsilon) {
  const double a = sensitivity / (2.0 * sigma);
  const double b = epsilon * sigma / sensitivity;
  return NormalCdf(a - b) - std::exp(epsilon) * NormalCdf(-a - b);
}

double GaussianEpsilon(double sigma, double sensitivity, double target_delta) {
  if (!(target_delta > 0.0 && target_delta < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "delta must lie in (0, 1)");
  }
  if (GaussianDelta(sigma, sensitivity, 0.0) <= target_delta) return 0.0;
  double hi = 1.0;
  while (GaussianDelta(sigma, sensitivity, hi) > target_delta) hi *= 2.0;
  double lo = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (GaussianDelta(sigma, sensitivity, mid) > target_delta ? lo : hi) = mid;
  }
  return hi;
}

TailedNoiseFamily EmbedDensity(const std::function<double(double)>& pdf,
                               double bin_width, int tail_start, double r,
                               const std::function<double(double)>& upper_tail) {
  if (!(bin_width > 0.0) || tail_start < 1 || !(r > 0.0 && r < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid embedding grid");
  }
  const int n = tail_start;
  const double w = bin_width;
  std::vector<double> p(n + 1);
  // The centre bin is split at 0, where symmetric densities may have a kink.
  p[0] = 2.0 * Integrate(pdf, 0.0, 0.5 * w);
  for (int i = 1; i < n; ++i) p[i] = Integrate(pdf, (i - 0.5) * w, (i + 0.5) * w);
  const double edge = (n - 0.5) * w;
  double beyond = 0.0;
  if (upper_tail) {
    beyond = upper_tail(edge);
  } else {
    boost::math::quadrature::exp_sinh<double> integrator;
    double error = 0.0;
    beyond = integrator.integrate(pdf, edge,
                                  std::numeric_limits<double>::infinity(),
                                  kQuadratureTolerance, &error);
    if (!std::isfinite(beyond) ||
        error > std::max(kQuadratureTolerance, 1e-8 * beyond)) {
      throw Error(ErrorCode::kQuadratureFailure,
                  "tail quadrature did not converge");
    }
  }
  p[n] = (1.0 - r) * beyond;
  return Renormalized(std::move(p), r, n, w, DomainKind::kContinuous);
}

double GaussianTailRatio(double sigma, double bin_width, int tail_start) {
  return std::exp(-(2.0 * tail_start + 1.0) * bin_width * bin_width /
                  (2.0 * sigma * sigma));
}

double LaplaceTailRatio(double scale, double bin_width) {
  return std::exp(-bin_width / scale);
}

TailedNoiseFamily EmbedGaussian(double sigma, double bin_width, int tail_start,
                                double r) {
  const double norm = 1.0 / (sigma * std::sqrt(2.0 * M_PI));
  return EmbedDensity(
      [=](double x) { return norm * std::exp(-0.5 * x * x / (sigma * sigma)); },
      bin_width, tail_start, r,
      [=](double x) { return 0.5 * std::erfc(x / (sigma * std::sqrt(2.0))); });
}

TailedNoiseFamily EmbedLaplace(double scale, double bin_width, int tail_start,
                               double r) {
  return EmbedDensity(
      [=](double x) { return std::exp(-std::abs(x) / scale) / (2.0 * scale); },
      bin_width, tail_start, r,
      [=](double x) { return 0.5 * std::exp(-x / scale); });
}

TailedNoiseFamily DiscreteGaussianFamily(double sigma, int tail_start,
                                         double r) {
  if (!(sigma > 0.0) || tail_start < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "discrete Gaussian needs sigma > 0 and N >= 1");
  }
  const int n = tail_start;
  auto weight = [&](double i) { return std::exp(-0.5 * i * i / (sigma * sigma)); };
  std::vector<double> p(n + 1);
  double z = 0.0;
  for (int i = 0; i < n; ++i) {
    p[i] = weight(i);
    z += (i == 0 ? 1.0 : 2.0) * p[i];
  }
  double beyond = 0.0;
  for (std::int64_t i = n;; ++i) {
    const double term = weight(static_cast<double>(i));
    beyond += term;
    if (term <= 1e-18 * beyond || term == 0.0) break;
  }
  z += 2.0 * beyond;
  if (!(2.0 * beyond / z < 1e-12)) {
    throw Error(ErrorCode::kRangeViolation,
                "tail start N = " + std::to_string(n) +
                    " leaves more than 1e-12 of the discrete Gaussian mass");
  }
  for (double& x : p) x /= z;
  p[n] = (1.0 - r) * beyond / z;
  return Renormalized(std::move(p), r, n, 1.0, DomainKind::kDiscrete);
}

double DiscreteGaussianTailRatio(double sigma, int tail_start) {
  return std::exp(-(2.0 * tail_start + 1.0) / (2.0 * sigma * sigma));
}

TailedNoiseFamily DiscreteLaplaceFamily(double scale, int tail_start,
                                        double r) {
  if (!(scale > 0.0) || tail_start < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "discrete Laplace needs scale > 0 and N >= 1");
  }
  const int n = tail_start;
  const double c = std::tanh(0.5 / scale);  // (e^(1/t) - 1) / (e^(1/t) + 1)
  std::vector<double> p(n + 1);
  for (int i = 0; i < n; ++i) p[i] = c * std::exp(-i / scale);
  const double beyond = c * std::exp(-n / scale) / -std::expm1(-1.0 / scale);
  p[n] = (1.0 - r) * beyond;
  return Renormalized(std::move(p), r, n, 1.0, DomainKind::kDiscrete);
}

double DiscreteLaplaceVariance(double scale) {
  const double em1 = std::expm1(1.0 / scale);
  return 2.0 * (em1 + 1.0) / (em1 * em1);
}

double LaplaceRdpNumeric(double scale, double sensitivity, RenyiOrder order,
                         double bin_width, int tail_start) {
  const TailedNoiseFamily family = EmbedLaplace(
      scale, bin_width, tail_start, LaplaceTailRatio(scale, bin_width));
  const ShiftSet shifts = ShiftSet::Create(sensitivity, bin_width);
  return GMax(family, shifts, order).rdp;
}

TailedNoiseFamily BaselineFamily(Mechanism mechanism, double sigma,
                                 double bin_width, int tail_start) {
  if (!(sigma > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "sigma must be positive");
  }
  switch (mechanism) {
    case Mechanism::kGaussian:
      return EmbedGaussian(sigma, bin_width, tail_start,
                           GaussianTailRatio(sigma, bin_width, tail_start));
    case Mechanism::kLaplace: {
      const double scale = sigma / std::sqrt(2.0);
      return EmbedLaplace(scale, bin_width, tail_start,
                          LaplaceTailRatio(scale, bin_width));
    }
    case Mechanism::kDiscreteGaussian: {
      auto variance = [&](double s) {
        return Variance(DiscreteGaussianFamily(
            s, tail_start, DiscreteGaussianTailRatio(s, tail_start)));
      };
      // The discrete variance never exceeds the parameter's square by much,
      // so sigma + 1 brackets the solution from above.
      const double s =
          SolveIncreasing(variance, sigma * sigma, 0.25 * sigma, sigma + 1.0);
      return DiscreteGaussianFamily(s, tail_start,
                                    DiscreteGaussianTailRatio(s, tail_start));
    }
    case Mechanism::kDiscreteLaplace: {
      // Variance increases with the scale.
      const double t = SolveIncreasing(
          [](double x) { return DiscreteLaplaceVariance(x); }, sigma * sigma,
          1e-3, 2.0 * sigma + 1.0);
      return DiscreteLaplaceFamily(t, tail_start, std::exp(-1.0 / t));
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown mechanism");
}

}  // namespace rdpnoise
