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

#include "diffmon/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include <Eigen/Dense>
#include <boost/math/distributions/binomial.hpp>

namespace diffmon {

namespace {

struct LineFit {
  double intercept = 0;
  double slope = 0;
  double var_intercept = 0;
  double var_slope = 0;
  double chi2 = 0;
};

// Weighted least squares for y = a + b x, centered internally for stability.
LineFit wls_line(const std::vector<double>& x, const std::vector<double>& y,
                 const std::vector<double>& sy) {
  if (x.size() < 2) throw std::invalid_argument("line fit needs 2 points");
  double sw = 0, swx = 0;
  for (size_t i = 0; i < x.size(); i++) {
    double w = 1.0 / (sy[i] * sy[i]);
    sw += w;
    swx += w * x[i];
  }
  double xbar = swx / sw;
  double sxx = 0, sxy = 0, sy_ = 0;
  for (size_t i = 0; i < x.size(); i++) {
    double w = 1.0 / (sy[i] * sy[i]);
    double xc = x[i] - xbar;
    sxx += w * xc * xc;
    sxy += w * xc * y[i];
    sy_ += w * y[i];
  }
  if (sxx <= 0) throw std::invalid_argument("degenerate abscissa span");
  LineFit fit;
  fit.slope = sxy / sxx;
  double a_centered = sy_ / sw;
  fit.intercept = a_centered - fit.slope * xbar;
  fit.var_slope = 1.0 / sxx;
  fit.var_intercept = 1.0 / sw + xbar * xbar / sxx;
  for (size_t i = 0; i < x.size(); i++) {
    double r = (y[i] - fit.intercept - fit.slope * x[i]) / sy[i];
    fit.chi2 += r * r;
  }
  return fit;
}

void validate_problem(const CollapseProblem& problem) {
  std::set<double> sizes;
  for (const auto& pt : problem.points) {
    if (!(pt.sigma > 0)) {
      throw std::invalid_argument("collapse points need positive errors");
    }
    sizes.insert(pt.n);
  }
  if (sizes.size() < 3 && problem.ansatz == CollapseAnsatz::kRescaled) {
    throw std::invalid_argument("need at least 3 distinct sizes");
  }
  if (sizes.size() < 2) {
    throw std::invalid_argument("need at least 2 distinct sizes");
  }
}

double quality_or_inf(const CollapseProblem& problem,
                      const CollapseParams& params) {
  try {
    return collapse_quality(problem, params);
  } catch (const std::exception&) {
    return std::numeric_limits<double>::infinity();
  }
}

struct GridBest {
  CollapseParams params;
  double q = std::numeric_limits<double>::infinity();
};

GridBest scan_grid(const CollapseProblem& problem, const GridAxis& apc,
                   const GridAxis& anu, const GridAxis& abeta,
                   QualityLandscape* landscape) {
  GridBest best;
  if (landscape) {
    landscape->p_c_values.clear();
    landscape->nu_values.clear();
    for (size_t i = 0; i < apc.count; i++) {
      landscape->p_c_values.push_back(apc.at(i));
    }
    for (size_t j = 0; j < anu.count; j++) {
      landscape->nu_values.push_back(anu.at(j));
    }
    landscape->log10_q.assign(apc.count * anu.count,
                              std::numeric_limits<double>::infinity());
  }
  for (size_t i = 0; i < apc.count; i++) {
    for (size_t j = 0; j < anu.count; j++) {
      double cell_min = std::numeric_limits<double>::infinity();
      for (size_t k = 0; k < abeta.count; k++) {
        CollapseParams p{apc.at(i), anu.at(j), abeta.at(k)};
        double q = quality_or_inf(problem, p);
        cell_min = std::min(cell_min, q);
        if (q < best.q) {
          best.q = q;
          best.params = p;
        }
      }
      if (landscape) {
        landscape->log10_q[i * anu.count + j] = std::log10(cell_min);
      }
    }
  }
  if (!std::isfinite(best.q)) {
    throw std::runtime_error("no grid cell produced a finite quality");
  }
  return best;
}

GridAxis zoom_axis(const GridAxis& current, double center,
                   const GridAxis& original) {
  if (current.count <= 1) return current;
  double spacing = (current.hi - current.lo) / (current.count - 1);
  GridAxis next;
  next.lo = std::max(original.lo, center - spacing);
  next.hi = std::min(original.hi, center + spacing);
  next.count = std::max<size_t>(current.count, 5);
  return next;
}

GridBest refine(const CollapseProblem& problem, GridBest start,
                GridAxis apc, GridAxis anu, GridAxis abeta,
                const CollapseScan& scan, size_t rounds) {
  GridBest best = start;
  for (size_t r = 0; r < rounds; r++) {
    apc = zoom_axis(apc, best.params.p_c, scan.p_c);
    anu = zoom_axis(anu, best.params.nu, scan.nu);
    abeta = zoom_axis(abeta, best.params.beta, scan.beta);
    GridBest round_best = scan_grid(problem, apc, anu, abeta, nullptr);
    if (round_best.q < best.q) best = round_best;
  }
  return best;
}

}  // namespace

double GridAxis::at(size_t i) const {
  if (count <= 1) return lo;
  return lo + (hi - lo) * static_cast<double>(i) /
                  static_cast<double>(count - 1);
}

double collapse_quality(const CollapseProblem& problem,
                        const CollapseParams& params) {
  validate_problem(problem);
  const size_t m = problem.points.size();
  std::vector<double> xs(m), ys(m), ss(m), ns(m);
  for (size_t i = 0; i < m; i++) {
    const auto& pt = problem.points[i];
    double scale = problem.ansatz == CollapseAnsatz::kRescaled
                       ? std::pow(pt.n, params.beta)
                       : 1.0;
    xs[i] = std::pow(pt.n, 1.0 / params.nu) * (pt.p - params.p_c);
    ys[i] = pt.y / scale;
    ss[i] = pt.sigma / scale;
    ns[i] = pt.n;
  }
  std::vector<size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return xs[a] < xs[b]; });
  std::vector<size_t> rank(m);
  for (size_t q = 0; q < m; q++) rank[order[q]] = q;

  double total = 0;
  size_t used = 0;
  for (size_t i = 0; i < m; i++) {
    size_t q = rank[i];
    // Nearest other-size neighbors in rescaled abscissa, one per side.
    ptrdiff_t below = -1, above = -1;
    for (ptrdiff_t j = static_cast<ptrdiff_t>(q) - 1; j >= 0; j--) {
      if (ns[order[j]] != ns[i]) {
        below = static_cast<ptrdiff_t>(order[j]);
        break;
      }
    }
    for (size_t j = q + 1; j < m; j++) {
      if (ns[order[j]] != ns[i]) {
        above = static_cast<ptrdiff_t>(order[j]);
        break;
      }
    }
    if (below < 0 || above < 0) continue;
    double x1 = xs[below], y1 = ys[below], s1 = ss[below];
    double x2 = xs[above], y2 = ys[above], s2 = ss[above];
    double mhat, var_m;
    if (x2 - x1 < 1e-300) {
      double w1 = 1.0 / (s1 * s1), w2 = 1.0 / (s2 * s2);
      mhat = (w1 * y1 + w2 * y2) / (w1 + w2);
      var_m = 1.0 / (w1 + w2);
    } else {
      double w1 = (x2 - xs[i]) / (x2 - x1);
      double w2 = (xs[i] - x1) / (x2 - x1);
      mhat = w1 * y1 + w2 * y2;
      var_m = w1 * w1 * s1 * s1 + w2 * w2 * s2 * s2;
    }
    double dev = ys[i] - mhat;
    total += dev * dev / (ss[i] * ss[i] + var_m);
    used++;
  }
  if (used == 0) {
    throw std::runtime_error(
        "no point had bracketing neighbors from other sizes");
  }
  return total / static_cast<double>(used);
}

CollapseFit minimize_collapse(const CollapseProblem& problem,
                              const CollapseScan& scan) {
  validate_problem(problem);
  CollapseFit fit;
  GridBest coarse =
      scan_grid(problem, scan.p_c, scan.nu, scan.beta, &fit.landscape);
  GridBest best = refine(problem, coarse, scan.p_c, scan.nu, scan.beta, scan,
                         scan.refine_rounds);
  fit.best = best.params;
  fit.q = best.q;

  auto near_edge = [](double v, const GridAxis& axis) {
    if (axis.count <= 1) return false;
    double spacing = (axis.hi - axis.lo) / (axis.count - 1);
    return v < axis.lo + 0.51 * spacing || v > axis.hi - 0.51 * spacing;
  };
  fit.converged = !near_edge(fit.best.p_c, scan.p_c) &&
                  !near_edge(fit.best.nu, scan.nu) &&
                  !near_edge(fit.best.beta, scan.beta);

  // Parametric bootstrap: jitter every y within its error, re-minimize from
  // a small grid around the point estimate, collect percentile intervals.
  std::mt19937_64 rng(scan.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> bpc, bnu, bbeta;
  auto boot_axis = [](const GridAxis& orig, double center) {
    if (orig.count <= 1) return orig;
    double spacing = (orig.hi - orig.lo) / (orig.count - 1);
    GridAxis a;
    a.lo = std::max(orig.lo, center - 2 * spacing);
    a.hi = std::min(orig.hi, center + 2 * spacing);
    a.count = 7;
    return a;
  };
  for (size_t b = 0; b < scan.bootstraps; b++) {
    CollapseProblem repl = problem;
    for (auto& pt : repl.points) pt.y += pt.sigma * gauss(rng);
    GridAxis apc = boot_axis(scan.p_c, fit.best.p_c);
    GridAxis anu = boot_axis(scan.nu, fit.best.nu);
    GridAxis abeta = boot_axis(scan.beta, fit.best.beta);
    try {
      GridBest g = scan_grid(repl, apc, anu, abeta, nullptr);
      g = refine(repl, g, apc, anu, abeta, scan, 2);
      bpc.push_back(g.params.p_c);
      bnu.push_back(g.params.nu);
      bbeta.push_back(g.params.beta);
    } catch (const std::exception&) {
      // A pathological replica is dropped rather than aborting the fit.
    }
  }
  auto interval = [](std::vector<double> v, double center) {
    std::array<double, 2> out{center, center};
    if (v.size() >= 4) {
      std::sort(v.begin(), v.end());
      out[0] = v[static_cast<size_t>(0.16 * (v.size() - 1))];
      out[1] = v[static_cast<size_t>(std::ceil(0.84 * (v.size() - 1)))];
    }
    out[0] = std::min(out[0], center);
    out[1] = std::max(out[1], center);
    return out;
  };
  fit.p_c_interval = interval(bpc, fit.best.p_c);
  fit.nu_interval = interval(bnu, fit.best.nu);
  fit.beta_interval = interval(bbeta, fit.best.beta);
  return fit;
}

namespace {

// Quadratic y = c0 + c1 (p - center) + c2 (p - center)^2 by weighted normal
// equations; returns coefficients in the centered frame.
Eigen::Vector3d quad_fit(const std::vector<PeakPoint>& pts, size_t begin,
                         size_t end, double center,
                         const std::vector<double>& y) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  for (size_t i = begin; i < end; i++) {
    double w = 1.0 / (pts[i].sigma * pts[i].sigma);
    double x = pts[i].p - center;
    Eigen::Vector3d basis(1.0, x, x * x);
    m += w * basis * basis.transpose();
    v += w * y[i] * basis;
  }
  return m.ldlt().solve(v);
}

}  // namespace

PeakFit peak_location(const std::vector<PeakPoint>& points, size_t halfwidth,
                      size_t bootstraps, uint64_t seed) {
  if (points.size() < 5) {
    throw std::invalid_argument("peak fit needs at least 5 points");
  }
  std::vector<PeakPoint> pts = points;
  std::sort(pts.begin(), pts.end(),
            [](const PeakPoint& a, const PeakPoint& b) { return a.p < b.p; });
  for (const auto& pt : pts) {
    if (!(pt.sigma > 0)) {
      throw std::invalid_argument("peak points need positive errors");
    }
  }
  size_t arg = 0;
  for (size_t i = 1; i < pts.size(); i++) {
    if (pts[i].y > pts[arg].y) arg = i;
  }
  if (arg < halfwidth || arg + halfwidth >= pts.size()) {
    throw std::runtime_error("sample maximum sits on the window edge");
  }
  size_t begin = arg - halfwidth, end = arg + halfwidth + 1;
  double center = 0;
  for (size_t i = begin; i < end; i++) center += pts[i].p;
  center /= static_cast<double>(end - begin);

  std::vector<double> y(pts.size());
  for (size_t i = 0; i < pts.size(); i++) y[i] = pts[i].y;
  Eigen::Vector3d c = quad_fit(pts, begin, end, center, y);
  if (!(c[2] < 0)) {
    throw std::runtime_error("window is not concave at the maximum");
  }
  PeakFit fit;
  fit.p_star = center - c[1] / (2 * c[2]);
  fit.curvature = c[2];
  fit.window_begin = begin;
  fit.window_end = end;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> vertices;
  vertices.reserve(bootstraps);
  for (size_t b = 0; b < bootstraps; b++) {
    std::vector<double> yb = y;
    for (size_t i = begin; i < end; i++) yb[i] += pts[i].sigma * gauss(rng);
    Eigen::Vector3d cb = quad_fit(pts, begin, end, center, yb);
    if (cb[2] < 0) vertices.push_back(center - cb[1] / (2 * cb[2]));
  }
  if (vertices.size() < bootstraps / 2) {
    throw std::runtime_error("peak bootstrap mostly non-concave");
  }
  double mean = 0;
  for (double v : vertices) mean += v;
  mean /= static_cast<double>(vertices.size());
  double var = 0;
  for (double v : vertices) var += (v - mean) * (v - mean);
  var /= static_cast<double>(vertices.size());
  fit.error = std::sqrt(var);
  return fit;
}

DynamicalFit fit_dynamical_exponent(const std::vector<SizeValue>& medians) {
  if (medians.size() < 3) {
    throw std::invalid_argument("need at least 3 sizes");
  }
  std::vector<SizeValue> pts = medians;
  std::sort(pts.begin(), pts.end(),
            [](const SizeValue& a, const SizeValue& b) { return a.n < b.n; });
  std::vector<double> ln_n, ln_tau, s_ln;
  for (const auto& pt : pts) {
    if (!(pt.value > 0) || !(pt.sigma > 0) || !(pt.n > 0)) {
      throw std::invalid_argument("sizes, values and errors must be positive");
    }
    ln_n.push_back(std::log(pt.n));
    ln_tau.push_back(std::log(pt.value));
    s_ln.push_back(pt.sigma / pt.value);
  }
  for (size_t i = 0; i + 1 < pts.size(); i++) {
    if (pts[i].n == pts[i + 1].n) {
      throw std::invalid_argument("duplicate size");
    }
  }

  DynamicalFit fit;
  LineFit power = wls_line(ln_n, ln_tau, s_ln);
  fit.z.value = power.slope;
  fit.z.error = std::sqrt(power.var_slope);
  fit.power_reduced_chi2 =
      power.chi2 / std::max<double>(1.0, static_cast<double>(pts.size()) - 2);
  for (size_t i = 0; i + 1 < pts.size(); i++) {
    fit.local_slopes.push_back((ln_tau[i + 1] - ln_tau[i]) /
                               (ln_n[i + 1] - ln_n[i]));
  }

  // Activated form: scan the stretching exponent, least squares in the rest.
  double best_psi = 0, best_chi2 = std::numeric_limits<double>::infinity();
  LineFit best_line;
  std::vector<double> psi_grid, chi2_grid;
  for (double psi = 0.05; psi <= 1.2 + 1e-12; psi += 0.0025) {
    std::vector<double> x;
    x.reserve(pts.size());
    for (const auto& pt : pts) x.push_back(std::pow(pt.n, psi));
    LineFit lf = wls_line(x, ln_tau, s_ln);
    psi_grid.push_back(psi);
    chi2_grid.push_back(lf.chi2);
    if (lf.chi2 < best_chi2) {
      best_chi2 = lf.chi2;
      best_psi = psi;
      best_line = lf;
    }
  }
  fit.psi.value = best_psi;
  fit.activated_coefficient = best_line.slope;
  fit.activated_reduced_chi2 =
      best_chi2 / std::max<double>(1.0, static_cast<double>(pts.size()) - 3);
  // One-parameter delta-chi2 = 1 bracket for the psi uncertainty.
  double lo = psi_grid.front(), hi = psi_grid.back();
  for (size_t i = 0; i < psi_grid.size(); i++) {
    if (psi_grid[i] < best_psi && chi2_grid[i] > best_chi2 + 1) {
      lo = psi_grid[i];
    }
    if (psi_grid[i] > best_psi && chi2_grid[i] > best_chi2 + 1 &&
        hi == psi_grid.back()) {
      hi = psi_grid[i];
    }
  }
  fit.psi.error = std::max(hi - best_psi, best_psi - lo) / 1.0;
  return fit;
}

TailRanking tail_scaling_discriminator(const std::vector<TailPoint>& curve,
                                       double window_lo, double window_hi) {
  std::vector<TailPoint> pts = curve;
  std::sort(pts.begin(), pts.end(),
            [](const TailPoint& a, const TailPoint& b) { return a.t < b.t; });
  if (window_lo == 0 && window_hi == 0 && !pts.empty()) {
    window_lo = pts.front().t;
    window_hi = pts.back().t;
  }
  std::vector<double> t, y, sy;
  for (const auto& pt : pts) {
    if (pt.t < window_lo || pt.t > window_hi) continue;
    if (!(pt.t > 0) || !(pt.survival > 0) || pt.survival > 1 ||
        pt.total == 0) {
      throw std::invalid_argument("tail points need t > 0, P in (0,1], counts");
    }
    double h = pt.survival * static_cast<double>(pt.total);
    double n = static_cast<double>(pt.total);
    // Half-count regularization keeps the P = 1 endpoint finite.
    double sigma_p = std::sqrt((h + 0.5) * (n - h + 0.5)) / (n * std::sqrt(n));
    t.push_back(pt.t);
    y.push_back(-std::log(pt.survival));
    sy.push_back(sigma_p / pt.survival);
  }
  if (t.size() < 4) {
    throw std::invalid_argument("too few points in the fit window");
  }
  if (t.back() / t.front() < 10.0) {
    throw std::invalid_argument("fit window spans less than a decade");
  }

  TailRanking ranking;
  ranking.window_lo = t.front();
  ranking.window_hi = t.back();
  const std::array<TailModel, 3> models{TailModel::kLinearT, TailModel::kSqrtT,
                                        TailModel::kLogT};
  for (size_t mi = 0; mi < 3; mi++) {
    std::vector<double> x(t.size());
    for (size_t i = 0; i < t.size(); i++) {
      switch (models[mi]) {
        case TailModel::kLinearT: x[i] = t[i]; break;
        case TailModel::kSqrtT: x[i] = std::sqrt(t[i]); break;
        case TailModel::kLogT: x[i] = std::log(t[i]); break;
      }
    }
    LineFit lf = wls_line(x, y, sy);
    TailFit tf;
    tf.model = models[mi];
    tf.slope = lf.slope;
    tf.intercept = lf.intercept;
    tf.reduced_chi2 =
        lf.chi2 / std::max<double>(1.0, static_cast<double>(t.size()) - 2);
    tf.aic = lf.chi2 + 4.0;  // two parameters each
    ranking.fits[mi] = tf;
  }
  std::sort(ranking.fits.begin(), ranking.fits.end(),
            [](const TailFit& a, const TailFit& b) {
              return a.reduced_chi2 < b.reduced_chi2;
            });
  return ranking;
}

WanderingFit wandering_exponent(const std::vector<SizeValue>& sigmas,
                                size_t bootstraps, uint64_t seed) {
  if (sigmas.size() < 4) {
    throw std::invalid_argument("need at least 4 sizes");
  }
  std::vector<double> ln_n, ln_s, s_ln;
  for (const auto& pt : sigmas) {
    if (!(pt.value > 0) || !(pt.sigma > 0)) {
      throw std::invalid_argument("values and errors must be positive");
    }
    ln_n.push_back(std::log(pt.n));
    ln_s.push_back(std::log(pt.value));
    s_ln.push_back(pt.sigma / pt.value);
  }
  LineFit lf = wls_line(ln_n, ln_s, s_ln);
  WanderingFit fit;
  fit.beta.value = lf.slope;
  fit.amplitude = std::exp(lf.intercept);
  fit.reduced_chi2 =
      lf.chi2 / std::max<double>(1.0, static_cast<double>(sigmas.size()) - 2);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double sum = 0, sum_sq = 0;
  size_t kept = 0;
  for (size_t b = 0; b < bootstraps; b++) {
    std::vector<double> yb(ln_s.size());
    bool ok = true;
    for (size_t i = 0; i < ln_s.size(); i++) {
      double v = sigmas[i].value + sigmas[i].sigma * gauss(rng);
      if (v <= 0) {
        ok = false;
        break;
      }
      yb[i] = std::log(v);
    }
    if (!ok) continue;
    double slope = wls_line(ln_n, yb, s_ln).slope;
    sum += slope;
    sum_sq += slope * slope;
    kept++;
  }
  if (kept >= 4) {
    double mean = sum / kept;
    fit.beta.error = std::sqrt(std::max(0.0, sum_sq / kept - mean * mean));
  } else {
    fit.beta.error = std::sqrt(lf.var_slope);
  }
  return fit;
}

double ks_one_sided_pvalue(std::vector<double> claimed_smaller,
                           std::vector<double> reference) {
  if (claimed_smaller.empty() || reference.empty()) {
    throw std::invalid_argument("ks needs non-empty samples");
  }
  std::sort(claimed_smaller.begin(), claimed_smaller.end());
  std::sort(reference.begin(), reference.end());
  const double m = static_cast<double>(claimed_smaller.size());
  const double n = static_cast<double>(reference.size());
  size_t i = 0, j = 0;
  double d = 0;
  while (i < claimed_smaller.size() || j < reference.size()) {
    double v;
    if (i >= claimed_smaller.size()) {
      v = reference[j];
    } else if (j >= reference.size()) {
      v = claimed_smaller[i];
    } else {
      v = std::min(claimed_smaller[i], reference[j]);
    }
    while (i < claimed_smaller.size() && claimed_smaller[i] <= v) i++;
    while (j < reference.size() && reference[j] <= v) j++;
    d = std::max(d, static_cast<double>(i) / m - static_cast<double>(j) / n);
  }
  if (d <= 0) return 1.0;
  return std::min(1.0, std::exp(-2.0 * d * d * m * n / (m + n)));
}

MedianEstimate median_with_interval(std::vector<double> values,
                                    double confidence) {
  if (values.empty()) throw std::invalid_argument("empty sample");
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  MedianEstimate est;
  est.median = n % 2 == 1 ? values[n / 2]
                          : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  double alpha_half = (1.0 - confidence) / 2.0;
  boost::math::binomial_distribution<double> bin(static_cast<double>(n), 0.5);
  // Largest k with P(X < k) <= alpha/2; the interval is the k-th and
  // (n+1-k)-th order statistics.
  size_t k = 1;
  for (size_t c = 1; c <= n / 2; c++) {
    if (boost::math::cdf(bin, static_cast<double>(c - 1)) <= alpha_half) {
      k = c;
    } else {
      break;
    }
  }
  est.lo = values[k - 1];
  est.hi = values[n - k];
  est.lo = std::min(est.lo, est.median);
  est.hi = std::max(est.hi, est.median);
  return est;
}

}  // namespace diffmon
