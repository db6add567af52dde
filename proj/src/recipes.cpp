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

#include "diffmon/recipes.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "diffmon/analysis.hpp"
#include "diffmon/measurers.hpp"
#include "diffmon/probes.hpp"
#include "diffmon/svg.hpp"

namespace diffmon {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

// Every table leads with the same provenance block.
std::string provenance(const std::string& recipe, const RecordSet& records,
                       const std::vector<std::string>& extra = {}) {
  std::ostringstream os;
  os << "# diffmon recipe=" << recipe << " schema=" << kRecordSchemaVersion
     << "\n";
  os << "# inputs_sha256=" << records.content_hash << "\n";
  os << "# rng=splitmix64+mt19937_64\n";
  os << "# configs=";
  bool first = true;
  for (const auto& [digest, _] : records.configs) {
    if (!first) os << ",";
    os << digest.substr(0, 12);
    first = false;
  }
  os << "\n";
  for (const auto& line : extra) os << "# " << line << "\n";
  return os.str();
}

struct Stats {
  double mean = 0, stderr_ = 0;
  size_t count = 0;
};

Stats mean_stats(const std::vector<double>& v) {
  Stats s;
  s.count = v.size();
  if (v.empty()) return s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  double var = 0;
  for (double x : v) var += (x - s.mean) * (x - s.mean);
  if (v.size() > 1) {
    var /= static_cast<double>(v.size() - 1);
    s.stderr_ = std::sqrt(var / static_cast<double>(v.size()));
  }
  return s;
}

const ExperimentConfig& config_of(const RecordSet& records,
                                  const RecordSet::Entry& e) {
  auto it = records.configs.find(e.digest);
  if (it == records.configs.end()) {
    throw std::runtime_error("record with unknown config digest " + e.digest);
  }
  return it->second;
}

std::vector<const RecordSet::Entry*> need_protocol(const RecordSet& records,
                                                   Protocol p,
                                                   const std::string& recipe) {
  auto entries = records.with_protocol(p);
  if (entries.empty()) {
    throw std::runtime_error("recipe " + recipe + ": no " + to_string(p) +
                             " records in the input set");
  }
  return entries;
}

std::string model_name(TailModel m) {
  switch (m) {
    case TailModel::kLinearT: return "t";
    case TailModel::kSqrtT: return "sqrt_t";
    case TailModel::kLogT: return "log_t";
  }
  return "?";
}

// ---------------------------------------------------------------------------

std::vector<Artifact> recipe_fig2a(const RecordSet& records) {
  auto entries = need_protocol(records, Protocol::kSteadyState, "fig2a-ami-peak");
  // (variant, n, p) -> ami samples
  std::map<std::tuple<std::string, size_t, double>, std::vector<double>> cells;
  for (const auto* e : entries) {
    const auto& cfg = config_of(records, *e);
    auto v = e->record.scalar("ami_tail_mean");
    if (!v) continue;
    cells[{to_string(cfg.variant), cfg.num_sites, cfg.p}].push_back(*v);
  }
  if (cells.empty()) {
    throw std::runtime_error("fig2a-ami-peak: steady_state records carry no AMI tail");
  }

  std::ostringstream table;
  table << provenance("fig2a-ami-peak", records);
  table << "variant,n,p,samples,ami_mean,ami_stderr\n";
  // (variant, n) -> curve
  std::map<std::pair<std::string, size_t>, std::vector<PeakPoint>> curves;
  for (const auto& [key, vals] : cells) {
    const auto& [variant, n, p] = key;
    Stats s = mean_stats(vals);
    table << variant << "," << n << "," << num(p) << "," << s.count << ","
          << num(s.mean) << "," << num(s.stderr_) << "\n";
    curves[{variant, n}].push_back(
        {p, s.mean, std::max(s.stderr_, 1e-9)});
  }

  std::ostringstream peaks;
  peaks << provenance("fig2a-ami-peak", records,
                      {"peak fit: quadratic, window halfwidth 2"});
  peaks << "variant,n,p_star,p_star_err,curvature\n";
  SvgFigure fig;
  SvgPanel& panel = fig.add_panel("AMI vs p", "p", "AMI");
  for (const auto& [key, pts] : curves) {
    const auto& [variant, n] = key;
    std::vector<std::array<double, 3>> bars;
    for (const auto& pt : pts) bars.push_back({pt.p, pt.y, pt.sigma});
    panel.add_errorbars(bars, variant + " N=" + std::to_string(n));
    std::vector<std::pair<double, double>> line;
    for (const auto& pt : pts) line.emplace_back(pt.p, pt.y);
    panel.add_line(line, "");
    if (pts.size() >= 5) {
      try {
        PeakFit pf = peak_location(pts);
        peaks << variant << "," << n << "," << num(pf.p_star) << ","
              << num(pf.error) << "," << num(pf.curvature) << "\n";
        panel.add_marker(pf.p_star, pts[0].y, "");
      } catch (const std::exception& e) {
        peaks << "# skipped variant=" << variant << " n=" << n << ": "
              << e.what() << "\n";
      }
    } else {
      peaks << "# skipped variant=" << variant << " n=" << n
            << ": fewer than 5 p points\n";
    }
  }
  return {{"fig2a_ami.csv", table.str()},
          {"fig2a_peaks.csv", peaks.str()},
          {"fig2a.svg", fig.render()}};
}

std::vector<Artifact> recipe_fig2b(const RecordSet& records) {
  auto entries = need_protocol(records, Protocol::kPurification, "fig2b-purification");
  // (variant, n) -> tau samples; track censoring
  std::map<std::pair<std::string, size_t>, std::vector<double>> taus;
  std::map<std::pair<std::string, size_t>, size_t> purified_counts;
  for (const auto* e : entries) {
    const auto& cfg = config_of(records, *e);
    auto tau = e->record.scalar("tau_p");
    if (!tau) continue;
    auto key = std::make_pair(to_string(cfg.variant), cfg.num_sites);
    taus[key].push_back(*tau);
    if (e->record.scalar("purified").value_or(0) == 1.0) {
      purified_counts[key]++;
    }
  }

  std::ostringstream table;
  table << provenance("fig2b-purification", records,
                      {"tau medians with order-statistic intervals (68%)"});
  table << "variant,n,samples,purified_fraction,tau_median,tau_lo,tau_hi\n";
  std::map<std::string, std::vector<SizeValue>> fit_inputs;
  SvgFigure fig;
  SvgPanel& panel = fig.add_panel("Median purification time", "N", "tau_P");
  panel.set_log_x(true);
  panel.set_log_y(true);
  for (const auto& [key, vals] : taus) {
    const auto& [variant, n] = key;
    MedianEstimate med = median_with_interval(vals);
    double frac =
        static_cast<double>(purified_counts[key]) / vals.size();
    table << variant << "," << n << "," << vals.size() << "," << num(frac)
          << "," << num(med.median) << "," << num(med.lo) << ","
          << num(med.hi) << "\n";
    double err = std::max((med.hi - med.lo) / 2, 1e-9 * med.median + 1e-12);
    fit_inputs[variant].push_back({static_cast<double>(n), med.median, err});
  }

  std::ostringstream fits;
  fits << provenance("fig2b-purification", records,
                     {"power: log tau = c + z log N",
                      "activated: log tau = a + c N^psi"});
  fits << "variant,z,z_err,power_reduced_chi2,psi,psi_err,"
          "activated_coefficient,activated_reduced_chi2,local_slopes\n";
  for (auto& [variant, pts] : fit_inputs) {
    std::sort(pts.begin(), pts.end(),
              [](const SizeValue& a, const SizeValue& b) { return a.n < b.n; });
    std::vector<std::array<double, 3>> bars;
    for (const auto& pt : pts) bars.push_back({pt.n, pt.value, pt.sigma});
    panel.add_errorbars(bars, variant);
    if (pts.size() < 3) {
      fits << "# skipped variant=" << variant << ": fewer than 3 sizes\n";
      continue;
    }
    DynamicalFit df = fit_dynamical_exponent(pts);
    fits << variant << "," << num(df.z.value) << "," << num(df.z.error) << ","
         << num(df.power_reduced_chi2) << "," << num(df.psi.value) << ","
         << num(df.psi.error) << "," << num(df.activated_coefficient) << ","
         << num(df.activated_reduced_chi2) << ",";
    for (size_t i = 0; i < df.local_slopes.size(); i++) {
      fits << (i ? ";" : "") << num(df.local_slopes[i]);
    }
    fits << "\n";
    std::vector<std::pair<double, double>> line;
    for (const auto& pt : pts) {
      double log_tau = std::log(pts.front().value) +
                       df.z.value * std::log(pt.n / pts.front().n);
      line.emplace_back(pt.n, std::exp(log_tau));
    }
    panel.add_line(line, variant + " slope " + num(df.z.value), true);
  }
  return {{"fig2b_tau.csv", table.str()},
          {"fig2b_fit.csv", fits.str()},
          {"fig2b.svg", fig.render()}};
}

std::vector<Artifact> recipe_fig3(const RecordSet& records) {
  auto entries = need_protocol(records, Protocol::kGrowth, "fig3-volume-tails");
  // variant -> t -> entropy samples
  std::map<std::string, std::map<double, std::vector<int64_t>>> by_variant;
  for (const auto* e : entries) {
    const auto& cfg = config_of(records, *e);
    const ProbeSeries* s = e->record.find_series("s_cut");
    if (s == nullptr) continue;
    auto& slot = by_variant[to_string(cfg.variant)];
    for (const auto& pt : s->points) {
      slot[pt.t].push_back(static_cast<int64_t>(pt.value));
    }
  }
  const std::vector<std::string> wanted = {"diffusive", "uncorrelated",
                                           "quenched"};
  std::vector<std::string> missing;
  for (const auto& w : wanted) {
    if (!by_variant.count(w)) missing.push_back(w);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += " " + m;
    throw std::runtime_error("fig3-volume-tails: missing growth records for variants:" +
                             list);
  }

  std::ostringstream table;
  table << provenance("fig3-volume-tails", records,
                      {"P = fraction of trajectories with S(t) below half "
                       "the ensemble mean"});
  table << "variant,t,p_below,stderr,total\n";
  std::map<std::string, std::vector<TailPoint>> tails;
  for (const auto& [variant, grid] : by_variant) {
    for (const auto& [t, samples] : grid) {
      FractionEstimate est = tail_below_half_mean(samples);
      table << variant << "," << num(t) << "," << num(est.fraction) << ","
            << num(est.stderr_binomial) << "," << est.total << "\n";
      if (est.fraction > 0 && t >= 4) {
        tails[variant].push_back({t, est.fraction, est.total});
      }
    }
  }

  std::ostringstream ranking;
  ranking << provenance("fig3-volume-tails", records,
                        {"weighted least squares of -log P per abscissa"});
  ranking << "variant,rank,model,slope,intercept,reduced_chi2,aic,"
             "window_lo,window_hi\n";
  SvgFigure fig;
  std::array<SvgPanel*, 3> panels = {
      &fig.add_panel("-log P vs sqrt(t)", "sqrt(t)", "-log P"),
      &fig.add_panel("-log P vs t", "t", "-log P"),
      &fig.add_panel("-log P vs log t", "log t", "-log P"),
  };
  for (const auto& [variant, pts] : tails) {
    try {
      TailRanking r = tail_scaling_discriminator(pts);
      for (size_t i = 0; i < r.fits.size(); i++) {
        const TailFit& f = r.fits[i];
        ranking << variant << "," << i + 1 << "," << model_name(f.model)
                << "," << num(f.slope) << "," << num(f.intercept) << ","
                << num(f.reduced_chi2) << "," << num(f.aic) << ","
                << num(r.window_lo) << "," << num(r.window_hi) << "\n";
      }
    } catch (const std::exception& e) {
      ranking << "# skipped variant=" << variant << ": " << e.what() << "\n";
    }
    std::vector<std::pair<double, double>> vs_sqrt, vs_t, vs_log;
    for (const auto& pt : pts) {
      double y = -std::log(pt.survival);
      vs_sqrt.emplace_back(std::sqrt(pt.t), y);
      vs_t.emplace_back(pt.t, y);
      vs_log.emplace_back(std::log(pt.t), y);
    }
    panels[0]->add_points(vs_sqrt, variant);
    panels[1]->add_points(vs_t, variant);
    panels[2]->add_points(vs_log, variant);
  }
  return {{"fig3_tails.csv", table.str()},
          {"fig3_ranking.csv", ranking.str()},
          {"fig3.svg", fig.render()}};
}

std::vector<Artifact> recipe_fig4(const RecordSet& records) {
  auto growth = records.with_protocol(Protocol::kGrowth);
  auto purif = records.with_protocol(Protocol::kPurification);
  std::vector<std::string> missing;
  if (growth.empty()) missing.push_back("growth");
  if (purif.empty()) missing.push_back("purification");
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += " " + m;
    throw std::runtime_error("fig4-area-tails: missing record kinds:" + list);
  }

  // Panel a: mean cut entropy, deep in the area phase.
  std::map<size_t, std::map<double, std::vector<double>>> mean_s;  // n -> t
  std::map<size_t, double> diffusivity_of;
  for (const auto* e : growth) {
    const auto& cfg = config_of(records, *e);
    const ProbeSeries* s = e->record.find_series("s_cut");
    if (s == nullptr) continue;
    diffusivity_of[cfg.num_sites] = cfg.diffusivity;
    for (const auto& pt : s->points) {
      mean_s[cfg.num_sites][pt.t].push_back(pt.value);
    }
  }
  std::ostringstream atab;
  atab << provenance("fig4-area-tails", records,
                     {"y = log(mean_S * sqrt(D t) / N) against sqrt(D t)"});
  atab << "n,t,sqrt_dt,mean_s,y\n";
  std::ostringstream afit;
  afit << provenance("fig4-area-tails", records);
  afit << "n,slope,intercept,r_squared,window_lo,window_hi,points\n";
  SvgFigure fig;
  SvgPanel& pa = fig.add_panel("Rare-region decay of the mean cut entropy",
                               "sqrt(D t)", "log(S sqrt(D t) / N)");
  for (const auto& [n, grid] : mean_s) {
    double d_coef = diffusivity_of[n];
    std::vector<std::pair<double, double>> pts;
    for (const auto& [t, vals] : grid) {
      Stats s = mean_stats(vals);
      double x = std::sqrt(d_coef * t);
      if (s.mean <= 0) continue;
      double y = std::log(s.mean * x / static_cast<double>(n));
      atab << n << "," << num(t) << "," << num(x) << "," << num(s.mean)
           << "," << num(y) << "\n";
      pts.emplace_back(x, y);
    }
    pa.add_points(pts, "N=" + std::to_string(n));
    // Fit the intermediate window: skip the first quarter and the noisy
    // late tail where fewer than a handful of trajectories still carry
    // entropy.
    if (pts.size() >= 6) {
      size_t begin = pts.size() / 4, end = pts.size();
      std::vector<double> xs, ys, ss;
      for (size_t i = begin; i < end; i++) {
        xs.push_back(pts[i].first);
        ys.push_back(pts[i].second);
        ss.push_back(1.0);
      }
      // Unweighted least squares; R^2 as the linearity score.
      double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
      double m = static_cast<double>(xs.size());
      for (size_t i = 0; i < xs.size(); i++) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
        syy += ys[i] * ys[i];
      }
      double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
      double intercept = (sy - slope * sx) / m;
      double ss_res = 0, ss_tot = 0, ybar = sy / m;
      for (size_t i = 0; i < xs.size(); i++) {
        double r = ys[i] - intercept - slope * xs[i];
        ss_res += r * r;
        ss_tot += (ys[i] - ybar) * (ys[i] - ybar);
      }
      double r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
      afit << n << "," << num(slope) << "," << num(intercept) << ","
           << num(r2) << "," << num(xs.front()) << "," << num(xs.back())
           << "," << xs.size() << "\n";
      std::vector<std::pair<double, double>> line = {
          {xs.front(), intercept + slope * xs.front()},
          {xs.back(), intercept + slope * xs.back()}};
      pa.add_line(line, "", true);
    } else {
      afit << "# skipped n=" << n << ": fewer than 6 usable times\n";
    }
  }

  // Panel b: purification survival vs t/N.
  std::map<size_t, std::pair<std::vector<double>, std::vector<uint8_t>>> taus;
  for (const auto* e : purif) {
    const auto& cfg = config_of(records, *e);
    auto tau = e->record.scalar("tau_p");
    if (!tau) continue;
    taus[cfg.num_sites].first.push_back(*tau);
    taus[cfg.num_sites].second.push_back(
        e->record.scalar("purified").value_or(0) != 1.0);
  }
  std::ostringstream btab;
  btab << provenance("fig4-area-tails", records,
                     {"survival P(tau_P > t) against t / N"});
  btab << "n,t,t_over_n,survival,stderr,surviving,total\n";
  std::ostringstream brates;
  brates << provenance("fig4-area-tails", records,
                       {"late-time rate: -log P = a + rate * (t/N), fitted "
                        "where P <= 0.5"});
  brates << "n,rate,rate_err,window_lo,window_hi,points\n";
  SvgPanel& pb = fig.add_panel("Purification survival", "t / N", "P");
  pb.set_log_y(true);
  for (const auto& [n, data] : taus) {
    const auto& [tau, censored] = data;
    std::vector<double> grid;
    for (double u = 0.25; u <= 12.0 + 1e-9; u += 0.25) {
      grid.push_back(u * static_cast<double>(n));
    }
    auto curve = survival_tail(tau, censored, grid);
    std::vector<std::pair<double, double>> pts;
    std::vector<double> xs, ys, ss;
    for (const auto& pt : curve) {
      double u = pt.t / static_cast<double>(n);
      btab << n << "," << num(pt.t) << "," << num(u) << ","
           << num(pt.survival) << "," << num(pt.stderr_) << ","
           << pt.surviving << "," << pt.total << "\n";
      if (pt.survival > 0) pts.emplace_back(u, pt.survival);
      if (pt.survival > 0 && pt.survival <= 0.5 && pt.surviving >= 3) {
        xs.push_back(u);
        ys.push_back(-std::log(pt.survival));
        ss.push_back(std::max(pt.stderr_ / pt.survival, 1e-9));
      }
    }
    pb.add_line(pts, "N=" + std::to_string(n));
    if (xs.size() >= 3) {
      // Weighted line fit for the exponential rate.
      double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
      for (size_t i = 0; i < xs.size(); i++) {
        double w = 1.0 / (ss[i] * ss[i]);
        sw += w;
        swx += w * xs[i];
        swy += w * ys[i];
        swxx += w * xs[i] * xs[i];
        swxy += w * xs[i] * ys[i];
      }
      double det = sw * swxx - swx * swx;
      double rate = (sw * swxy - swx * swy) / det;
      double rate_err = std::sqrt(sw / det);
      brates << n << "," << num(rate) << "," << num(rate_err) << ","
             << num(xs.front()) << "," << num(xs.back()) << "," << xs.size()
             << "\n";
    } else {
      brates << "# skipped n=" << n << ": fewer than 3 tail points\n";
    }
  }
  return {{"fig4_area.csv", atab.str()},
          {"fig4_area_fit.csv", afit.str()},
          {"fig4_survival.csv", btab.str()},
          {"fig4_rates.csv", brates.str()},
          {"fig4.svg", fig.render()}};
}

std::vector<Artifact> recipe_s1(const RecordSet& records) {
  auto entries = need_protocol(records, Protocol::kSteadyState, "s1-collapse");
  // variant -> points
  std::map<std::string,
           std::map<std::pair<size_t, double>, std::vector<double>>>
      cells;
  for (const auto* e : entries) {
    const auto& cfg = config_of(records, *e);
    auto v = e->record.scalar("ami_tail_mean");
    if (!v) continue;
    cells[to_string(cfg.variant)][{cfg.num_sites, cfg.p}].push_back(*v);
  }

  std::vector<Artifact> artifacts;
  for (const auto& [variant, grid] : cells) {
    std::set<size_t> sizes;
    std::set<double> ps;
    for (const auto& [key, _] : grid) {
      sizes.insert(key.first);
      ps.insert(key.second);
    }
    if (sizes.size() < 3 || ps.size() < 5) continue;

    CollapseProblem prob;
    prob.ansatz = CollapseAnsatz::kRescaled;
    for (const auto& [key, vals] : grid) {
      Stats s = mean_stats(vals);
      prob.points.push_back({static_cast<double>(key.first), key.second,
                             s.mean, std::max(s.stderr_, 1e-6)});
    }
    double p_lo = *ps.begin(), p_hi = *ps.rbegin();
    CollapseScan scan;
    scan.p_c = {p_lo + 0.15 * (p_hi - p_lo), p_hi - 0.15 * (p_hi - p_lo), 21};
    scan.nu = {0.7, 2.6, 20};
    scan.beta = {-0.2, 0.6, 9};
    scan.bootstraps = 60;
    CollapseFit fit = minimize_collapse(prob, scan);

    std::ostringstream land;
    land << provenance("s1-collapse", records,
                       {"variant=" + variant,
                        "landscape: log10 Q minimized over beta"});
    land << "p_c,nu,log10_q\n";
    for (size_t i = 0; i < fit.landscape.p_c_values.size(); i++) {
      for (size_t j = 0; j < fit.landscape.nu_values.size(); j++) {
        land << num(fit.landscape.p_c_values[i]) << ","
             << num(fit.landscape.nu_values[j]) << ","
             << num(fit.landscape.log10_q[i * fit.landscape.nu_values.size() +
                                          j])
             << "\n";
      }
    }
    std::ostringstream best;
    best << provenance("s1-collapse", records, {"variant=" + variant});
    best << "p_c,p_c_lo,p_c_hi,nu,nu_lo,nu_hi,beta,beta_lo,beta_hi,q,"
            "converged\n";
    best << num(fit.best.p_c) << "," << num(fit.p_c_interval[0]) << ","
         << num(fit.p_c_interval[1]) << "," << num(fit.best.nu) << ","
         << num(fit.nu_interval[0]) << "," << num(fit.nu_interval[1]) << ","
         << num(fit.best.beta) << "," << num(fit.beta_interval[0]) << ","
         << num(fit.beta_interval[1]) << "," << num(fit.q) << ","
         << (fit.converged ? 1 : 0) << "\n";

    SvgFigure fig;
    SvgPanel& heat = fig.add_panel("log10 Q (" + variant + ")", "p_c", "nu");
    heat.set_heatmap(fit.landscape.p_c_values, fit.landscape.nu_values,
                     fit.landscape.log10_q);
    heat.add_marker(fit.best.p_c, fit.best.nu, "best");
    SvgPanel& master = fig.add_panel("Collapsed data", "N^{1/nu}(p-p_c)",
                                     "y / N^beta");
    std::map<size_t, std::vector<std::pair<double, double>>> clouds;
    for (const auto& pt : prob.points) {
      double x = std::pow(pt.n, 1.0 / fit.best.nu) * (pt.p - fit.best.p_c);
      double y = pt.y / std::pow(pt.n, fit.best.beta);
      clouds[static_cast<size_t>(pt.n)].emplace_back(x, y);
    }
    for (const auto& [n, pts] : clouds) {
      master.add_points(pts, "N=" + std::to_string(n));
    }
    std::string tag = variant == "diffusive" ? "" : "_" + variant;
    artifacts.push_back({"s1_landscape" + tag + ".csv", land.str()});
    artifacts.push_back({"s1_fit" + tag + ".csv", best.str()});
    artifacts.push_back({"s1_collapse" + tag + ".svg", fig.render()});
  }
  if (artifacts.empty()) {
    throw std::runtime_error(
        "s1-collapse: need steady_state records with >= 3 sizes and >= 5 p "
        "values for at least one variant");
  }
  return artifacts;
}

std::vector<Artifact> recipe_s2(const RecordSet& records) {
  auto entries = need_protocol(records, Protocol::kU1, "s2-u1-check");
  std::map<std::pair<size_t, double>,
           std::tuple<size_t, size_t, size_t, double, double>>
      cells;  // (n, p) -> (count, purified, product_z, tau_sum, violations)
  for (const auto* e : entries) {
    const auto& cfg = config_of(records, *e);
    auto& [count, purified, product_z, tau_sum, violations] =
        cells[{cfg.num_sites, cfg.p}];
    count++;
    purified += e->record.scalar("purified").value_or(0) == 1.0;
    product_z += e->record.scalar("product_z_final").value_or(0) == 1.0;
    tau_sum += e->record.scalar("tau_p").value_or(0);
    violations += e->record.scalar("monotone_violations").value_or(0);
  }
  std::ostringstream table;
  table << provenance("s2-u1-check", records,
                      {"cap = ceil(100 log2(N) / p) blocks"});
  table << "n,p,samples,purified_fraction,z_product_fraction,tau_mean,"
           "monotone_violations,cap\n";
  SvgFigure fig;
  SvgPanel& panel =
      fig.add_panel("Charge-conserving purification", "N", "mean tau_P");
  std::map<double, std::vector<std::pair<double, double>>> curves;
  for (const auto& [key, val] : cells) {
    const auto& [n, p] = key;
    const auto& [count, purified, product_z, tau_sum, violations] = val;
    double cap = std::ceil(100.0 * std::log2(static_cast<double>(n)) / p);
    table << n << "," << num(p) << "," << count << ","
          << num(static_cast<double>(purified) / count) << ","
          << num(static_cast<double>(product_z) / count) << ","
          << num(tau_sum / count) << "," << num(violations) << "," << num(cap)
          << "\n";
    curves[p].emplace_back(static_cast<double>(n), tau_sum / count);
  }
  for (const auto& [p, pts] : curves) {
    panel.add_line(pts, "p=" + num(p));
  }
  return {{"s2_u1.csv", table.str()}, {"s2_u1.svg", fig.render()}};
}

std::vector<Artifact> recipe_s4(const RecordSet& records) {
  auto entries = need_protocol(records, Protocol::kCodeLength, "s4-codelength");
  const double margin = 5.0;  // blocks past entanglement before pooling
  std::map<int64_t, size_t> hist;
  size_t pooled = 0, total_records = 0, entangled = 0;
  double violations = 0;
  const RecordSet::Entry* example = nullptr;
  for (const auto* e : entries) {
    total_records++;
    if (e->record.scalar("entangled").value_or(0) != 1.0) continue;
    entangled++;
    violations += e->record.scalar("overlap_violations").value_or(0);
    double t0 = e->record.scalar("t_entangle").value_or(0);
    const ProbeSeries* dmin = e->record.find_series("d_min");
    if (dmin == nullptr) continue;
    if (example == nullptr && !dmin->points.empty()) example = e;
    for (const auto& pt : dmin->points) {
      if (pt.t < t0 + margin) continue;
      hist[static_cast<int64_t>(pt.value)]++;
      pooled++;
    }
  }
  if (pooled == 0) {
    throw std::runtime_error(
        "s4-codelength: no probes after the settling margin; need longer "
        "runs or more records");
  }
  std::ostringstream table;
  table << provenance(
      "s4-codelength", records,
      {"pooled d_min probes with t >= t_entangle + " + num(margin)});
  table << "length,count,fraction\n";
  for (const auto& [len, count] : hist) {
    table << len << "," << count << ","
          << num(static_cast<double>(count) / pooled) << "\n";
  }
  std::ostringstream summary;
  summary << provenance("s4-codelength", records);
  summary << "records,entangled,overlap_violations,pooled_probes,"
             "zero_length_count\n";
  summary << total_records << "," << entangled << "," << num(violations)
          << "," << pooled << ","
          << (hist.count(0) ? hist.at(0) : 0) << "\n";

  SvgFigure fig;
  SvgPanel& hpanel =
      fig.add_panel("Shortest code length", "d_min", "fraction");
  std::vector<std::pair<double, double>> bars;
  for (const auto& [len, count] : hist) {
    bars.emplace_back(static_cast<double>(len),
                      static_cast<double>(count) / pooled);
  }
  hpanel.add_line(bars, "pooled");
  hpanel.add_points(bars, "");
  SvgPanel& tpanel = fig.add_panel("Example trajectory", "t", "length");
  if (example != nullptr) {
    for (const char* name : {"d_x", "d_y", "d_z"}) {
      const ProbeSeries* s = example->record.find_series(name);
      if (s == nullptr) continue;
      std::vector<std::pair<double, double>> pts;
      for (const auto& pt : s->points) pts.emplace_back(pt.t, pt.value);
      tpanel.add_line(pts, name);
    }
  }
  return {{"s4_hist.csv", table.str()},
          {"s4_summary.csv", summary.str()},
          {"s4_codelength.svg", fig.render()}};
}

std::vector<Artifact> recipe_s6(const RecordSet& records) {
  auto entries = need_protocol(records, Protocol::kPurification, "s6-hyperuniformity");
  std::map<size_t, std::vector<double>> variances;
  for (const auto* e : entries) {
    const auto& cfg = config_of(records, *e);
    if (e->record.scalar("purified").value_or(0) != 1.0) continue;
    auto v = e->record.scalar("w_variance_at_tau_p");
    if (!v) continue;
    variances[cfg.num_sites].push_back(*v);
  }
  if (variances.empty()) {
    throw std::runtime_error(
        "s6-hyperuniformity: no purified trajectories carrying height "
        "variances (walker variants only)");
  }
  std::ostringstream table;
  table << provenance(
      "s6-hyperuniformity", records,
      {"reference: uniformly random half filling, matched counts, fixed "
       "seed per size",
       "sigma_w = sqrt(mean spatial variance of W)"});
  table << "n,samples,sigma_w,sigma_w_err,sigma_w_reference,ks_p_smaller\n";
  std::vector<SizeValue> fit_pts;
  SvgFigure fig;
  SvgPanel& panel = fig.add_panel("Walker height wandering", "N", "sigma(W)");
  panel.set_log_x(true);
  panel.set_log_y(true);
  std::vector<std::array<double, 3>> bars, ref_bars;
  for (const auto& [n, vals] : variances) {
    std::mt19937_64 rng(0x5eedULL + n);
    std::vector<double> ref;
    ref.reserve(vals.size());
    for (size_t i = 0; i < vals.size(); i++) {
      auto cfg = MeasurerConfiguration::random_half_filled(
          n, 1.0, SsepBoundary::kPeriodic, rng);
      ref.push_back(height_function(cfg.occupancy()).variance);
    }
    double ks = ks_one_sided_pvalue(vals, ref);
    Stats s = mean_stats(vals);
    Stats r = mean_stats(ref);
    double sigma_w = std::sqrt(s.mean);
    double sigma_err = s.count > 1 ? s.stderr_ / (2 * sigma_w) : 1e-3;
    table << n << "," << vals.size() << "," << num(sigma_w) << ","
          << num(sigma_err) << "," << num(std::sqrt(r.mean)) << "," << num(ks)
          << "\n";
    fit_pts.push_back(
        {static_cast<double>(n), sigma_w, std::max(sigma_err, 1e-9)});
    bars.push_back({static_cast<double>(n), sigma_w, sigma_err});
    ref_bars.push_back({static_cast<double>(n), std::sqrt(r.mean), 0.0});
  }
  panel.add_errorbars(bars, "at purification");
  panel.add_errorbars(ref_bars, "random half filling");

  std::ostringstream fit_csv;
  fit_csv << provenance("s6-hyperuniformity", records,
                        {"sigma(W) = A N^beta, log-log weighted fit"});
  fit_csv << "beta,beta_err,amplitude,reduced_chi2,sizes\n";
  if (fit_pts.size() >= 4) {
    WanderingFit wf = wandering_exponent(fit_pts);
    fit_csv << num(wf.beta.value) << "," << num(wf.beta.error) << ","
            << num(wf.amplitude) << "," << num(wf.reduced_chi2) << ","
            << fit_pts.size() << "\n";
  } else {
    fit_csv << "# skipped: fewer than 4 sizes\n";
  }
  return {{"s6_sigma.csv", table.str()},
          {"s6_fit.csv", fit_csv.str()},
          {"s6_hyperuniformity.svg", fig.render()}};
}

}  // namespace

const std::vector<std::string>& recipe_names() {
  static const std::vector<std::string> names = {
      "fig2a-ami-peak",  "fig2b-purification", "fig3-volume-tails",
      "fig4-area-tails", "s1-collapse",        "s2-u1-check",
      "s4-codelength",   "s6-hyperuniformity",
  };
  return names;
}

std::vector<Artifact> run_recipe(const std::string& name,
                                 const RecordSet& records) {
  if (name == "fig2a-ami-peak") return recipe_fig2a(records);
  if (name == "fig2b-purification") return recipe_fig2b(records);
  if (name == "fig3-volume-tails") return recipe_fig3(records);
  if (name == "fig4-area-tails") return recipe_fig4(records);
  if (name == "s1-collapse") return recipe_s1(records);
  if (name == "s2-u1-check") return recipe_s2(records);
  if (name == "s4-codelength") return recipe_s4(records);
  if (name == "s6-hyperuniformity") return recipe_s6(records);
  std::string known;
  for (const auto& n : recipe_names()) known += " " + n;
  throw std::invalid_argument("unknown recipe '" + name + "'; known:" + known);
}

void write_artifacts(const std::vector<Artifact>& artifacts,
                     const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  for (const auto& a : artifacts) {
    std::ofstream out(out_dir / a.name, std::ios::binary);
    if (!out) {
      throw std::runtime_error("cannot write " + (out_dir / a.name).string());
    }
    out << a.bytes;
  }
}

}  // namespace diffmon
