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

#include "rdpnoise/accountant.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <iomanip>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include <fftw3.h>

#include "rdpnoise/error.h"
#include "rdpnoise/rdp_objective.h"

namespace rdpnoise {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Below this many output points the direct sum beats the FFT.
constexpr std::size_t kDirectConvolutionLimit = 1 << 14;

double Objective(const std::function<double(double)>& rdp, double alpha,
                 double log_inv_delta, int compositions) {
  const double value =
      compositions * rdp(alpha) + log_inv_delta / (alpha - 1.0);
  return std::isfinite(value) ? value : kInf;
}

std::vector<double> DirectConvolve(std::span<const double> a,
                                   std::span<const double> b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

class FftBuffers {
 public:
  explicit FftBuffers(std::size_t n)
      : n_(n),
        real_(fftw_alloc_real(n)),
        spectrum_a_(fftw_alloc_complex(n / 2 + 1)),
        spectrum_b_(fftw_alloc_complex(n / 2 + 1)) {
    const int size = static_cast<int>(n);
    forward_a_ = fftw_plan_dft_r2c_1d(size, real_, spectrum_a_, FFTW_ESTIMATE);
    forward_b_ = fftw_plan_dft_r2c_1d(size, real_, spectrum_b_, FFTW_ESTIMATE);
    inverse_ = fftw_plan_dft_c2r_1d(size, spectrum_a_, real_, FFTW_ESTIMATE);
  }
  ~FftBuffers() {
    fftw_destroy_plan(forward_a_);
    fftw_destroy_plan(forward_b_);
    fftw_destroy_plan(inverse_);
    fftw_free(real_);
    fftw_free(spectrum_a_);
    fftw_free(spectrum_b_);
  }
  FftBuffers(const FftBuffers&) = delete;
  FftBuffers& operator=(const FftBuffers&) = delete;

  std::vector<double> Convolve(std::span<const double> a,
                               std::span<const double> b) {
    const bool square = a.data() == b.data() && a.size() == b.size();
    Load(a);
    fftw_execute(forward_a_);
    if (!square) {
      Load(b);
      fftw_execute(forward_b_);
    }
    const fftw_complex* other = square ? spectrum_a_ : spectrum_b_;
    for (std::size_t k = 0; k < n_ / 2 + 1; ++k) {
      const double re = spectrum_a_[k][0] * other[k][0] -
                        spectrum_a_[k][1] * other[k][1];
      const double im = spectrum_a_[k][0] * other[k][1] +
                        spectrum_a_[k][1] * other[k][0];
      spectrum_a_[k][0] = re;
      spectrum_a_[k][1] = im;
    }
    fftw_execute(inverse_);
    std::vector<double> out(a.size() + b.size() - 1);
    const double scale = 1.0 / static_cast<double>(n_);
    for (std::size_t k = 0; k < out.size(); ++k) {
      out[k] = std::max(0.0, real_[k] * scale);
    }
    return out;
  }

 private:
  void Load(std::span<const double> x) {
    std::copy(x.begin(), x.end(), real_);
    std::fill(real_ + x.size(), real_ + n_, 0.0);
  }

  std::size_t n_;
  double* real_;
  fftw_complex* spectrum_a_;
  fftw_complex* spectrum_b_;
  fftw_plan forward_a_, forward_b_, inverse_;
};

std::vector<double> Convolve(std::span<const double> a,
                             std::span<const double> b) {
  const std::size_t n = a.size() + b.size() - 1;
  if (std::min(a.size(), b.size()) <= 32 || n <= kDirectConvolutionLimit / 8 ||
      a.size() * b.size() <= kDirectConvolutionLimit * 64) {
    return DirectConvolve(a, b);
  }
  std::size_t size = 1;
  while (size < n) size <<= 1;
  FftBuffers buffers(size);
  return buffers.Convolve(a, b);
}

PrivacyLossDistribution Combine(const PrivacyLossDistribution& a,
                                const PrivacyLossDistribution& b,
                                const ComposeSettings& settings) {
  const std::size_t length = a.size() + b.size() - 1;
  if (length > settings.max_grid_points) {
    throw Error(ErrorCode::kGridOverflow,
                "composed privacy-loss grid needs " + std::to_string(length) +
                    " points; increase the grid width");
  }
  std::vector<double> masses = Convolve(a.masses(), b.masses());
  double inf_mass = 1.0 - (1.0 - a.inf_mass()) * (1.0 - b.inf_mass());
  std::int64_t offset = a.offset() + b.offset();

  // Trim negligible ends: the low end merges upward, the high end is treated
  // as infinite loss. Both only raise delta(eps).
  std::size_t lo = 0;
  double low_mass = 0.0;
  while (lo + 1 < masses.size() &&
         low_mass + masses[lo] <= settings.trim_mass) {
    low_mass += masses[lo++];
  }
  std::size_t hi = masses.size();
  double high_mass = 0.0;
  while (hi > lo + 1 && high_mass + masses[hi - 1] <= settings.trim_mass) {
    high_mass += masses[--hi];
  }
  std::vector<double> kept(masses.begin() + lo, masses.begin() + hi);
  kept.front() += low_mass;
  inf_mass += high_mass;
  offset += static_cast<std::int64_t>(lo);
  return PrivacyLossDistribution(a.width(), offset, std::move(kept), inf_mass,
                                 a.pessimistic() && b.pessimistic());
}

// log P(i) for bin i.
double LogMass(std::span<const double> log_p, double log_r, std::int64_t i) {
  const std::int64_t n = static_cast<std::int64_t>(log_p.size()) - 1;
  const std::int64_t a = i < 0 ? -i : i;
  return a <= n ? log_p[a] : log_p[n] + static_cast<double>(a - n) * log_r;
}

std::vector<double> LogHead(const TailedNoiseFamily& family) {
  std::vector<double> out;
  out.reserve(family.head().size());
  for (std::size_t i = 0; i < family.head().size(); ++i) {
    const double p = family.head()[i];
    if (!(p > 0.0)) {
      throw Error(ErrorCode::kStrictFeasibilityViolation,
                  "p[" + std::to_string(i) + "] is zero; losses are infinite");
    }
    out.push_back(std::log(p));
  }
  return out;
}

int MaxShift(const TailedNoiseFamily& family, double sensitivity) {
  return ShiftSet::Create(sensitivity, family.bin_width()).max_shift();
}

}  // namespace

MomentsResult MomentsEpsilon(const std::function<double(double)>& rdp,
                             double target_delta, int compositions,
                             const AlphaBracket& bracket) {
  if (!(target_delta > 0.0 && target_delta < 1.0) || compositions < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "moments accountant needs delta in (0, 1) and N_c >= 1");
  }
  if (!(bracket.lo > 1.0) || !(bracket.hi > bracket.lo) ||
      bracket.grid_points < 3) {
    throw Error(ErrorCode::kInvalidArgument, "invalid alpha bracket");
  }
  const double log_inv_delta = std::log(1.0 / target_delta);
  const int n = bracket.grid_points;
  const double x_lo = std::log(bracket.lo - 1.0);
  const double x_hi = std::log(bracket.hi - 1.0);
  auto alpha_at = [&](int j) {
    return 1.0 + std::exp(x_lo + (x_hi - x_lo) * j / (n - 1));
  };

  int best = 0;
  double best_value = kInf;
  for (int j = 0; j < n; ++j) {
    const double value = Objective(rdp, alpha_at(j), log_inv_delta,
                                   compositions);
    if (value < best_value) {
      best_value = value;
      best = j;
    }
  }
  if (!std::isfinite(best_value)) {
    throw Error(ErrorCode::kSearchFailure,
                "RDP is infinite across the whole alpha bracket");
  }
  if (best == 0 || best == n - 1) {
    throw Error(ErrorCode::kSearchFailure,
                "moments-accountant minimum lies on the alpha bracket end " +
                    std::to_string(alpha_at(best)) + "; widen the bracket");
  }

  // Golden-section search in log(alpha - 1) between the grid neighbours.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::log(alpha_at(best - 1) - 1.0);
  double b = std::log(alpha_at(best + 1) - 1.0);
  auto f = [&](double x) {
    return Objective(rdp, 1.0 + std::exp(x), log_inv_delta, compositions);
  };
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 100 && b - a > 1e-10; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  MomentsResult result{best_value, alpha_at(best)};
  const double x = 0.5 * (a + b);
  const double fx = f(x);
  if (fx < result.epsilon) result = {fx, 1.0 + std::exp(x)};
  return result;
}

MomentsResult FamilyMomentsEpsilon(const TailedNoiseFamily& family,
                                   double sensitivity, double target_delta,
                                   int compositions,
                                   const AlphaBracket& bracket) {
  const int max_shift = MaxShift(family, sensitivity);
  const TailedMasses masses{family.head(), family.tail_ratio()};
  auto rdp = [&](double alpha) {
    return RenyiObjective(masses, RenyiOrder(alpha), max_shift).Max().rdp;
  };
  return MomentsEpsilon(rdp, target_delta, compositions, bracket);
}

PrivacyLossDistribution::PrivacyLossDistribution(double width,
                                                 std::int64_t offset,
                                                 std::vector<double> masses,
                                                 double inf_mass,
                                                 bool pessimistic)
    : width_(width),
      offset_(offset),
      masses_(std::move(masses)),
      inf_mass_(inf_mass),
      pessimistic_(pessimistic) {
  if (!(width > 0.0) || masses_.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "privacy-loss grid needs a positive width and a point");
  }
  for (double m : masses_) {
    if (!(m >= 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "negative privacy-loss mass");
    }
  }
  if (!(inf_mass >= 0.0 && inf_mass <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "inf mass outside [0, 1]");
  }
}

double PrivacyLossDistribution::TotalMass() const {
  return std::accumulate(masses_.begin(), masses_.end(), 0.0) + inf_mass_;
}

double PrivacyLossDistribution::MeanLoss() const {
  double total = 0.0;
  double weighted = 0.0;
  for (std::size_t k = 0; k < masses_.size(); ++k) {
    total += masses_[k];
    weighted += masses_[k] * loss(k);
  }
  return weighted / total;
}

PrivacyLossDistribution PldFromFamily(const TailedNoiseFamily& family, int t,
                                      double grid_width, bool pessimistic) {
  if (!(grid_width > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "grid width must be positive");
  }
  if (t < 0) throw Error(ErrorCode::kInvalidArgument, "shift must be >= 0");
  const std::vector<double> log_p = LogHead(family);
  if (t == 0) {
    return PrivacyLossDistribution(grid_width, 0, {1.0}, 0.0, pessimistic);
  }
  const std::int64_t n = family.tail_start();
  const double r = family.tail_ratio();
  const double log_r = std::log(r);
  const double p_n = family.head().back();
  auto index_of = [&](double loss) {
    const double x = loss / grid_width;
    return static_cast<std::int64_t>(pessimistic ? std::ceil(x)
                                                 : std::floor(x));
  };

  // (index, mass) for every atom; bins i <= -N and i >= N + t form two
  // atoms of constant loss.
  std::vector<std::pair<std::int64_t, double>> atoms;
  atoms.reserve(static_cast<std::size_t>(2 * n + t + 1));
  for (std::int64_t i = -n + 1; i < n + t; ++i) {
    const double log_num = LogMass(log_p, log_r, i);
    const double log_den = LogMass(log_p, log_r, i - t);
    atoms.emplace_back(index_of(log_num - log_den), std::exp(log_num));
  }
  atoms.emplace_back(index_of(-t * log_r), p_n / (1.0 - r));
  atoms.emplace_back(index_of(t * log_r), p_n * std::pow(r, t) / (1.0 - r));

  std::int64_t lo = atoms.front().first;
  std::int64_t hi = lo;
  for (const auto& [k, m] : atoms) {
    lo = std::min(lo, k);
    hi = std::max(hi, k);
  }
  std::vector<double> masses(static_cast<std::size_t>(hi - lo + 1), 0.0);
  for (const auto& [k, m] : atoms) masses[k - lo] += m;
  return PrivacyLossDistribution(grid_width, lo, std::move(masses), 0.0,
                                 pessimistic);
}

PrivacyLossDistribution PldSelfCompose(const PrivacyLossDistribution& pld,
                                       int compositions,
                                       const ComposeSettings& settings) {
  if (compositions < 1) {
    throw Error(ErrorCode::kInvalidArgument, "compositions must be >= 1");
  }
  PrivacyLossDistribution result = pld;
  PrivacyLossDistribution base = pld;
  bool have_result = false;
  for (int n = compositions; n > 0; n >>= 1) {
    if (n & 1) {
      result = have_result ? Combine(result, base, settings) : base;
      have_result = true;
    }
    if (n > 1) base = Combine(base, base, settings);
  }
  return result;
}

double DeltaForEpsilon(const PrivacyLossDistribution& pld, double epsilon) {
  double delta = 0.0;
  const auto masses = pld.masses();
  for (std::size_t k = masses.size(); k-- > 0;) {
    const double loss = pld.loss(k);
    if (loss <= epsilon) break;
    delta -= masses[k] * std::expm1(epsilon - loss);
  }
  return std::min(1.0, pld.inf_mass() + delta);
}

double EpsilonForDelta(const PrivacyLossDistribution& pld,
                       double target_delta) {
  if (target_delta < pld.inf_mass()) {
    throw Error(ErrorCode::kUnattainable,
                "delta " + std::to_string(target_delta) +
                    " is below the infinite-loss mass " +
                    std::to_string(pld.inf_mass()));
  }
  if (DeltaForEpsilon(pld, 0.0) <= target_delta) return 0.0;
  double lo = 0.0;
  double hi = std::max(0.0, pld.loss(pld.size() - 1));
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (DeltaForEpsilon(pld, mid) > target_delta ? lo : hi) = mid;
  }
  return hi;
}

double ExactSingleDelta(const TailedNoiseFamily& family, int t,
                        double epsilon) {
  if (t < 0) throw Error(ErrorCode::kInvalidArgument, "shift must be >= 0");
  const double scale = std::exp(epsilon);
  if (t == 0) return std::max(0.0, -std::expm1(epsilon));
  const std::vector<double> log_p = LogHead(family);
  const std::int64_t n = family.tail_start();
  const double r = family.tail_ratio();
  const double log_r = std::log(r);
  const double p_n = family.head().back();
  double delta = 0.0;
  for (std::int64_t i = -n + 1; i < n + t; ++i) {
    const double num = std::exp(LogMass(log_p, log_r, i));
    const double den = std::exp(LogMass(log_p, log_r, i - t));
    delta += std::max(0.0, num - scale * den);
  }
  // Left tail: P(i - t) = r^t P(i); right tail: P(i - t) = r^-t P(i).
  const double rt = std::pow(r, t);
  delta += p_n / (1.0 - r) * std::max(0.0, 1.0 - scale * rt);
  delta += p_n * rt / (1.0 - r) * std::max(0.0, 1.0 - scale / rt);
  return delta;
}

namespace {

// Per-shift composed PLDs at one grid width.
std::vector<PrivacyLossDistribution> ComposedShifts(
    const TailedNoiseFamily& family, int max_shift, int compositions,
    double width, const ComposeSettings& settings) {
  std::vector<PrivacyLossDistribution> out;
  out.reserve(max_shift);
  for (int t = 1; t <= max_shift; ++t) {
    out.push_back(
        PldSelfCompose(PldFromFamily(family, t, width), compositions,
                       settings));
  }
  return out;
}

template <typename Query>
std::vector<double> RefinedWorstCase(const TailedNoiseFamily& family,
                                     double sensitivity, int compositions,
                                     std::size_t count,
                                     const AccountSettings& settings,
                                     double& final_width, Query query) {
  const int max_shift = MaxShift(family, sensitivity);
  double width = settings.grid_width;
  std::vector<double> previous;
  for (int level = 0;; ++level) {
    const auto plds =
        ComposedShifts(family, max_shift, compositions, width,
                       settings.compose);
    std::vector<double> worst(count, -kInf);
    for (const auto& pld : plds) {
      for (std::size_t j = 0; j < count; ++j) {
        worst[j] = std::max(worst[j], query(pld, j));
      }
    }
    final_width = width;
    if (!settings.refine || level >= settings.max_refinements) return worst;
    if (!previous.empty()) {
      double change = 0.0;
      for (std::size_t j = 0; j < count; ++j) {
        if (std::isinf(worst[j]) && std::isinf(previous[j])) continue;
        change = std::max(change, std::abs(worst[j] - previous[j]));
      }
      if (change < settings.refine_tol) return worst;
    }
    previous = std::move(worst);
    width *= 0.5;
  }
}

}  // namespace

PrivacyCurve AccountFamily(const TailedNoiseFamily& family, double sensitivity,
                           int compositions, std::span<const double> deltas,
                           const AccountSettings& settings) {
  double width = settings.grid_width;
  const std::vector<double> eps = RefinedWorstCase(
      family, sensitivity, compositions, deltas.size(), settings, width,
      [&](const PrivacyLossDistribution& pld, std::size_t j) {
        return deltas[j] < pld.inf_mass() ? kInf
                                          : EpsilonForDelta(pld, deltas[j]);
      });
  PrivacyCurve curve;
  for (std::size_t j = 0; j < deltas.size(); ++j) {
    curve.points.push_back({eps[j], deltas[j]});
  }
  std::stable_sort(curve.points.begin(), curve.points.end(),
                   [](const CurvePoint& a, const CurvePoint& b) {
                     return a.epsilon < b.epsilon ||
                            (a.epsilon == b.epsilon && a.delta > b.delta);
                   });
  curve.provenance.accountant = "pld";
  curve.provenance.compositions = compositions;
  curve.provenance.sensitivity = sensitivity;
  curve.provenance.sigma = std::sqrt(Variance(family));
  curve.provenance.grid_width = width;
  curve.provenance.pessimistic = true;
  return curve;
}

PrivacyCurve AccountFamilyDeltas(const TailedNoiseFamily& family,
                                 double sensitivity, int compositions,
                                 std::span<const double> epsilons,
                                 const AccountSettings& settings) {
  double width = settings.grid_width;
  AccountSettings delta_settings = settings;
  // Deltas are compared on a relative scale through their logarithm.
  const std::vector<double> log_deltas = RefinedWorstCase(
      family, sensitivity, compositions, epsilons.size(), delta_settings,
      width, [&](const PrivacyLossDistribution& pld, std::size_t j) {
        return std::log(DeltaForEpsilon(pld, epsilons[j]));
      });
  PrivacyCurve curve;
  for (std::size_t j = 0; j < epsilons.size(); ++j) {
    curve.points.push_back({epsilons[j], std::exp(log_deltas[j])});
  }
  std::stable_sort(curve.points.begin(), curve.points.end(),
                   [](const CurvePoint& a, const CurvePoint& b) {
                     return a.epsilon < b.epsilon;
                   });
  curve.provenance.accountant = "pld";
  curve.provenance.compositions = compositions;
  curve.provenance.sensitivity = sensitivity;
  curve.provenance.sigma = std::sqrt(Variance(family));
  curve.provenance.grid_width = width;
  curve.provenance.pessimistic = true;
  return curve;
}

double AccountedEpsilon(const TailedNoiseFamily& family, double sensitivity,
                        int compositions, double target_delta,
                        const AccountSettings& settings) {
  const double deltas[] = {target_delta};
  return AccountFamily(family, sensitivity, compositions, deltas, settings)
      .points.front()
      .epsilon;
}

void WriteCurveCsv(std::span<const PrivacyCurve> curves, std::ostream& out) {
  out << "epsilon,delta,mechanism,accountant,compositions,sigma,sensitivity\n";
  out << std::setprecision(17);
  for (const auto& curve : curves) {
    std::vector<CurvePoint> points = curve.points;
    std::stable_sort(points.begin(), points.end(),
                     [](const CurvePoint& a, const CurvePoint& b) {
                       return a.epsilon < b.epsilon;
                     });
    const auto& p = curve.provenance;
    for (const auto& point : points) {
      out << point.epsilon << ',' << point.delta << ',' << p.mechanism << ','
          << p.accountant << ',' << p.compositions << ',' << p.sigma << ','
          << p.sensitivity << '\n';
    }
  }
}

void WriteCurveCsv(const PrivacyCurve& curve, std::ostream& out) {
  WriteCurveCsv(std::span<const PrivacyCurve>(&curve, 1), out);
}

}  // namespace rdpnoise
