// Copyright 2026 The diffmon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DIFFMON_ANALYSIS_HPP
#define DIFFMON_ANALYSIS_HPP

#include <array>
#include <cstdint>
#include <vector>

namespace diffmon {

// ---------------------------------------------------------------------------
// Scaling collapse

struct CollapsePoint {
  double n = 0;      // system size
  double p = 0;      // tuning parameter
  double y = 0;      // observable
  double sigma = 0;  // standard error of y, must be positive
};

// kRescaled: y ~ N^beta f(N^{1/nu} (p - p_c)), three parameters.
// kCrossing: y ~ g(N^{1/nu} (p - p_c)), beta pinned to zero.
enum class CollapseAnsatz { kRescaled, kCrossing };

struct CollapseProblem {
  std::vector<CollapsePoint> points;
  CollapseAnsatz ansatz = CollapseAnsatz::kRescaled;
};

struct CollapseParams {
  double p_c = 0;
  double nu = 1;
  double beta = 0;  // ignored for the crossing ansatz
};

// Reduced chi-square of each rescaled point against a local master curve
// interpolated linearly through its two bracketing neighbors drawn from the
// other sizes. Points without a bracketing pair are skipped; if every point
// is skipped the problem is ill-posed and this throws.
double collapse_quality(const CollapseProblem& problem,
                        const CollapseParams& params);

struct GridAxis {
  double lo = 0;
  double hi = 0;
  size_t count = 1;  // grid points, endpoints inclusive (count 1 pins lo)

  double at(size_t i) const;
};

struct CollapseScan {
  GridAxis p_c;
  GridAxis nu;
  GridAxis beta;  // leave count 1 for the crossing ansatz
  size_t refine_rounds = 3;
  size_t bootstraps = 100;
  uint64_t seed = 1;
};

// log10 Q over the initial (p_c, nu) grid, minimized over the beta axis.
struct QualityLandscape {
  std::vector<double> p_c_values;
  std::vector<double> nu_values;
  std::vector<double> log10_q;  // row-major: [i_pc * nu_count + i_nu]
};

struct CollapseFit {
  CollapseParams best;
  double q = 0;
  // Percentile 16-84 bootstrap intervals.
  std::array<double, 2> p_c_interval{};
  std::array<double, 2> nu_interval{};
  std::array<double, 2> beta_interval{};
  bool converged = false;  // false when the minimum sat on the scan edge
  QualityLandscape landscape;
};

CollapseFit minimize_collapse(const CollapseProblem& problem,
                              const CollapseScan& scan);

// ---------------------------------------------------------------------------
// Curve fits

struct ValueWithError {
  double value = 0;
  double error = 0;
};

struct PeakPoint {
  double p = 0;
  double y = 0;
  double sigma = 0;
};

struct PeakFit {
  double p_star = 0;
  double error = 0;        // parametric bootstrap
  double curvature = 0;    // quadratic coefficient, negative at a maximum
  size_t window_begin = 0; // index range [begin, end) used for the fit
  size_t window_end = 0;
};

// Quadratic fit in a window of half width `halfwidth` around the sample
// maximum; throws if the maximum sits on the edge of the data or the
// curvature comes out non-negative.
PeakFit peak_location(const std::vector<PeakPoint>& points,
                      size_t halfwidth = 2, size_t bootstraps = 1000,
                      uint64_t seed = 1);

struct SizeValue {
  double n = 0;
  double value = 0;
  double sigma = 0;
};

struct DynamicalFit {
  ValueWithError z;              // power law: log tau = const + z log N
  double power_reduced_chi2 = 0;
  std::vector<double> local_slopes;  // consecutive-size slopes in log-log
  ValueWithError psi;            // activated: log tau = a + c N^psi
  double activated_coefficient = 0;  // c
  double activated_reduced_chi2 = 0;
};

// Fits both forms and reports both; the caller decides which story the
// diagnostics support.
DynamicalFit fit_dynamical_exponent(const std::vector<SizeValue>& medians);

enum class TailModel { kLinearT, kSqrtT, kLogT };

struct TailPoint {
  double t = 0;
  double survival = 0;   // P in (0, 1]
  uint64_t total = 0;    // samples behind P, for binomial errors
};

struct TailFit {
  TailModel model{};
  double slope = 0;
  double intercept = 0;
  double reduced_chi2 = 0;
  double aic = 0;
};

struct TailRanking {
  std::array<TailFit, 3> fits;  // sorted, best first
  double window_lo = 0;
  double window_hi = 0;
};

// Weighted least squares of -log P against t, sqrt(t), log t over
// [window_lo, window_hi] (pass 0, 0 for the full range). The window must
// cover at least one decade in t.
TailRanking tail_scaling_discriminator(const std::vector<TailPoint>& curve,
                                       double window_lo = 0,
                                       double window_hi = 0);

struct WanderingFit {
  ValueWithError beta;
  double amplitude = 0;  // sigma_w = amplitude * N^beta
  double reduced_chi2 = 0;
};

WanderingFit wandering_exponent(const std::vector<SizeValue>& sigmas,
                                size_t bootstraps = 400, uint64_t seed = 1);

// ---------------------------------------------------------------------------
// Small statistics helpers

// One-sided two-sample Kolmogorov-Smirnov p-value for the alternative that
// `claimed_smaller` is stochastically smaller than `reference`, using the
// asymptotic bound p = exp(-2 d^2 m n / (m + n)) on the one-sided statistic
// d = sup_x (F_smaller(x) - F_reference(x)).
double ks_one_sided_pvalue(std::vector<double> claimed_smaller,
                           std::vector<double> reference);

struct MedianEstimate {
  double median = 0;
  double lo = 0;
  double hi = 0;
};

// Median with a distribution-free order-statistic interval at the given
// two-sided confidence (default one sigma).
MedianEstimate median_with_interval(std::vector<double> values,
                                    double confidence = 0.6827);

}  // namespace diffmon

#endif
