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

// Release gate. Eleven end-to-end criteria, each printing one PASS/FAIL
// line; the exit code is the number of failures. Run everything (default)
// or a subset with --criterion. Tolerances and sample counts are pinned
// here on purpose: changing them is a release decision, not a flag.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "diffmon/analysis.hpp"
#include "diffmon/clifford.hpp"
#include "diffmon/clipped.hpp"
#include "diffmon/dense_oracle.hpp"
#include "diffmon/experiment.hpp"
#include "diffmon/measurers.hpp"
#include "diffmon/probes.hpp"
#include "diffmon/stabilizer.hpp"

namespace diffmon {
namespace {

// --------------------------------------------------------------------------
// Pinned thresholds.

// chi-squared critical values at the 0.01 level.
constexpr double kChi2Crit1 = 6.635;    // 1 dof, measurement outcomes
constexpr double kChi2Crit19 = 36.191;  // 19 dof, walker configurations

// Peak windows for the ancilla mutual information maximum.
constexpr double kUncorrPeakLo = 0.14, kUncorrPeakHi = 0.18;
constexpr double kDiffPeakLo = 0.29, kDiffPeakHi = 0.37;

constexpr double kAreaFitMinR2 = 0.95;       // log-linear rare-region decay
constexpr double kRateSpreadMax = 1.20;      // survival rates, max over min
constexpr double kExponentTol = 0.10;        // synthetic recovery, relative
constexpr double kKsThreshold = 0.01;        // one-sided KS significance

struct Result {
  bool pass = false;
  std::string detail;
};

Result fail(std::string why) { return {false, std::move(why)}; }
Result pass(std::string what) { return {true, std::move(what)}; }

std::string num(double v, int prec = 4) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

std::vector<TrajectoryRecord> run_batch(const ExperimentConfig& cfg,
                                        size_t count) {
  std::vector<TrajectoryRecord> out;
  out.reserve(count);
  for (uint64_t i = 0; i < count; i++) out.push_back(run_trajectory(cfg, i));
  return out;
}

std::vector<double> scalar_samples(const std::vector<TrajectoryRecord>& recs,
                                   const std::string& name) {
  std::vector<double> out;
  for (const auto& r : recs) {
    auto v = r.scalar(name);
    if (v) out.push_back(*v);
  }
  return out;
}

double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? 0 : s / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0;
  double m = mean_of(v), var = 0;
  for (double x : v) var += (x - m) * (x - m);
  var /= static_cast<double>(v.size() - 1);
  return std::sqrt(var / static_cast<double>(v.size()));
}

// --------------------------------------------------------------------------
// 1. The bit-packed stabilizer engine against brute-force linear algebra:
//    every prefix entropy exact, measurement outcomes unbiased.

Result criterion_1() {
  std::mt19937_64 rng(20260814);
  uint64_t random_outcomes = 0, plus_outcomes = 0;
  size_t histories = 0;
  auto drive = [&](StabilizerState& st, DenseState& dense,
                   size_t n) -> const char* {
    for (int block = 0; block < 6; block++) {
      for (size_t i = block % 2; i + 1 < n; i += 2) {
        CliffordGate g = CliffordGate::random_two_qubit(rng);
        st.apply_gate(GateTable::from_gate(g), i, i + 1);
        dense.apply(g, i, i + 1);
      }
      for (size_t s = 0; s < n; s++) {
        if (!std::bernoulli_distribution(0.3)(rng)) continue;
        auto r = st.measure_z(s, rng);
        auto d = dense.force_measure_z(s, r.outcome);
        double chosen = r.outcome == 1 ? d.prob_plus : 1.0 - d.prob_plus;
        bool stab_random =
            r.kind != StabilizerState::MeasureCase::kDeterministic;
        if (std::abs(chosen - 0.5) < 1e-9) {
          if (!stab_random) return "oracle random where engine deterministic";
          random_outcomes++;
          if (r.outcome == 1) plus_outcomes++;
        } else if (std::abs(chosen - 1.0) < 1e-9) {
          if (stab_random) return "oracle deterministic where engine random";
        } else {
          return "oracle Born probability neither 1/2 nor 1";
        }
      }
      if (block == 2 || block == 5) {
        for (size_t cut = 1; cut < n; cut++) {
          double want = dense.entropy_interval(0, cut);
          if (std::abs(static_cast<double>(st.entropy_interval(0, cut)) -
                       want) > 1e-7) {
            return "prefix entropy mismatch";
          }
        }
        if (std::abs(static_cast<double>(st.entropy_total()) -
                     dense.entropy_total()) > 1e-7) {
          return "total entropy mismatch";
        }
      }
    }
    return nullptr;
  };

  for (size_t n = 2; n <= 8; n++) {
    for (int h = 0; h < 1000; h++) {
      StabilizerState st = StabilizerState::random_product(n, rng);
      DenseState dense = DenseState::from_stabilizer(st);
      if (const char* err = drive(st, dense, n)) {
        return fail(std::string(err) + " (pure, n=" + std::to_string(n) +
                    ")");
      }
      histories++;
    }
  }
  // Mixed-state leg against density matrices, where rank growth also acts.
  for (size_t n = 2; n <= 6; n++) {
    for (int h = 0; h < 200; h++) {
      StabilizerState st(n);
      DenseState dense = DenseState::from_stabilizer(st);
      if (const char* err = drive(st, dense, n)) {
        return fail(std::string(err) + " (mixed, n=" + std::to_string(n) +
                    ")");
      }
      histories++;
    }
  }

  double half = static_cast<double>(random_outcomes) / 2.0;
  double chi2 = random_outcomes == 0
                    ? 1e9
                    : (static_cast<double>(plus_outcomes) - half) *
                          (static_cast<double>(plus_outcomes) - half) /
                          (half / 2.0);
  if (chi2 >= kChi2Crit1) {
    return fail("outcome bias chi2=" + num(chi2) + " over " +
                std::to_string(random_outcomes) + " random outcomes");
  }
  return pass(std::to_string(histories) + " histories, entropies exact, " +
              std::to_string(random_outcomes) +
              " random outcomes chi2=" + num(chi2) + " < " + num(kChi2Crit1));
}

// --------------------------------------------------------------------------
// 2. Clipped gauge equals direct rank entropies on circuit-evolved states.

Result criterion_2() {
  std::mt19937_64 rng(2);
  const size_t n = 64;
  size_t intervals_checked = 0;
  for (int state_i = 0; state_i < 200; state_i++) {
    StabilizerState st = StabilizerState::random_product(n, rng);
    int blocks = 10 + static_cast<int>(rng() % 30);
    for (int block = 0; block < blocks; block++) {
      for (size_t i = block % 2; i + 1 < n; i += 2) {
        st.apply_gate(GateTable::from_gate(CliffordGate::random_two_qubit(rng)),
                      i, i + 1);
      }
      for (size_t s = 0; s < n; s++) {
        if (std::bernoulli_distribution(0.2)(rng)) st.measure_z(s, rng);
      }
    }
    ClippedGauge gauge = ClippedGauge::from_state(st);
    if (!gauge.two_ends_per_site()) {
      return fail("endpoint count violated at state " +
                  std::to_string(state_i));
    }
    auto profile = gauge.entropy_all_prefixes();
    for (size_t cut = 0; cut <= n; cut++) {
      if (profile[cut] != st.entropy_interval(0, cut)) {
        return fail("prefix mismatch at state " + std::to_string(state_i));
      }
    }
    for (int k = 0; k < 20; k++) {
      size_t a = rng() % n, b = rng() % (n + 1);
      if (a > b) std::swap(a, b);
      if (gauge.entropy_interval(a, b) != st.entropy_interval(a, b)) {
        return fail("interval mismatch at state " + std::to_string(state_i));
      }
      intervals_checked++;
    }
  }
  return pass("200 states, all prefixes and " +
              std::to_string(intervals_checked) + " random intervals equal");
}

// --------------------------------------------------------------------------
// 3. Walker dynamics: uniform stationary measure and particle conservation.

Result criterion_3() {
  std::mt19937_64 rng(3);
  // The slowest density mode of three walkers on six sites relaxes in a few
  // time units; sample every ten so the chi-squared test sees independent
  // draws.
  const double sample_dt = 10.0;
  auto walkers = MeasurerConfiguration::random_half_filled(
      6, 1.0, SsepBoundary::kPeriodic, rng);
  std::map<std::vector<uint8_t>, size_t> counts;
  const size_t samples = 100000;
  for (size_t i = 0; i < samples; i++) {
    walkers.ssep_advance(sample_dt, rng);
    counts[walkers.occupancy()]++;
  }
  if (counts.size() != 20) {
    return fail("visited " + std::to_string(counts.size()) +
                " of 20 configurations");
  }
  double expected = static_cast<double>(samples) / 20.0, chi2 = 0;
  for (const auto& [_, c] : counts) {
    double d = static_cast<double>(c) - expected;
    chi2 += d * d / expected;
  }
  if (chi2 >= kChi2Crit19) {
    return fail("ring occupation chi2=" + num(chi2) + " >= " +
                num(kChi2Crit19));
  }

  // Closed chain is stationary-uniform too (symmetric rates).
  auto closed = MeasurerConfiguration::random_half_filled(
      6, 1.0, SsepBoundary::kClosed, rng);
  std::map<std::vector<uint8_t>, size_t> closed_counts;
  for (size_t i = 0; i < samples; i++) {
    closed.ssep_advance(sample_dt, rng);
    closed_counts[closed.occupancy()]++;
  }
  double chi2_closed = 0;
  if (closed_counts.size() != 20) {
    return fail("closed chain visited " +
                std::to_string(closed_counts.size()) +
                " of 20 configurations");
  }
  for (const auto& [_, c] : closed_counts) {
    double d = static_cast<double>(c) - expected;
    chi2_closed += d * d / expected;
  }
  if (chi2_closed >= kChi2Crit19) {
    return fail("closed chain chi2=" + num(chi2_closed) + " >= " +
                num(kChi2Crit19));
  }

  // Conservation over at least 1e6 accepted-or-rejected events.
  auto big = MeasurerConfiguration::random_half_filled(
      64, 1.0, SsepBoundary::kPeriodic, rng);
  uint64_t start_events = big.event_count();
  while (big.event_count() - start_events < 1000000) {
    big.ssep_advance(10.0, rng);
    size_t particles = 0;
    for (uint8_t o : big.occupancy()) particles += o;
    if (particles != 32) {
      return fail("particle number drifted to " + std::to_string(particles));
    }
  }
  uint64_t events = big.event_count() - start_events;
  return pass("ring chi2=" + num(chi2) + ", closed chi2=" +
              num(chi2_closed) + " (crit " + num(kChi2Crit19) + "), " +
              std::to_string(events) + " events conserved N");
}

// --------------------------------------------------------------------------
// 4. Charge-conserving circuits always purify to a Z product state.

Result criterion_4() {
  size_t total = 0;
  double worst_tau_frac = 0;
  for (size_t n : {16, 32}) {
    for (double p : {0.1, 0.3}) {
      ExperimentConfig cfg;
      cfg.protocol = Protocol::kU1;
      cfg.variant = ModelVariant::kU1Symmetric;
      cfg.num_sites = n;
      cfg.p = p;
      cfg.record_series = false;
      cfg.master_seed = 41;
      double cap = std::ceil(100.0 * std::log2(static_cast<double>(n)) / p);
      for (uint64_t i = 0; i < 1000; i++) {
        TrajectoryRecord rec = run_trajectory(cfg, i);
        total++;
        if (rec.scalar("purified").value_or(0) != 1.0) {
          return fail("trajectory did not purify within " + num(cap) +
                      " blocks (n=" + std::to_string(n) + ", p=" + num(p) +
                      ", index " + std::to_string(i) + ")");
        }
        if (rec.scalar("product_z_final").value_or(0) != 1.0) {
          return fail("purified state not a Z product (n=" +
                      std::to_string(n) + ", p=" + num(p) + ")");
        }
        if (rec.scalar("monotone_violations").value_or(0) != 0.0) {
          return fail("undetermined-charge count increased (n=" +
                      std::to_string(n) + ", p=" + num(p) + ")");
        }
        worst_tau_frac =
            std::max(worst_tau_frac, rec.scalar("tau_p").value_or(0) / cap);
      }
    }
  }
  return pass(std::to_string(total) +
              " trajectories all reached Z products; slowest used " +
              num(100 * worst_tau_frac, 3) + "% of the cap");
}

// --------------------------------------------------------------------------
// Steady-state scan shared by criteria 5 and 6.

std::vector<PeakPoint> ami_curve(ModelVariant variant, size_t n,
                                 const std::vector<double>& ps,
                                 size_t samples_per_point,
                                 double probe_cadence, uint64_t seed) {
  std::vector<PeakPoint> curve;
  for (double p : ps) {
    ExperimentConfig cfg;
    cfg.protocol = Protocol::kSteadyState;
    cfg.variant = variant;
    cfg.num_sites = n;
    cfg.p = p;
    cfg.record_series = false;
    cfg.probe_cadence = probe_cadence;
    cfg.master_seed = seed;
    auto recs = run_batch(cfg, samples_per_point);
    auto ami = scalar_samples(recs, "ami_tail_mean");
    curve.push_back({p, mean_of(ami), std::max(stderr_of(ami), 1e-9)});
  }
  return curve;
}

// 5. Without walkers the mutual-information peak sits near p = 0.16.

Result criterion_5() {
  const std::vector<double> ps = {0.10, 0.12, 0.14, 0.16, 0.18, 0.20, 0.22};
  const std::vector<std::pair<size_t, size_t>> plan = {
      {32, 600}, {64, 400}, {128, 250}};
  std::string stars;
  for (const auto& [n, samples] : plan) {
    auto curve = ami_curve(ModelVariant::kUncorrelated, n, ps, samples, 2.0,
                           5000 + n);
    PeakFit fit = peak_location(curve);
    if (!(fit.p_star > kUncorrPeakLo && fit.p_star < kUncorrPeakHi)) {
      return fail("N=" + std::to_string(n) + " peak at " + num(fit.p_star) +
                  " outside (" + num(kUncorrPeakLo) + ", " +
                  num(kUncorrPeakHi) + ")");
    }
    stars += (stars.empty() ? "" : ", ") + std::string("N=") +
             std::to_string(n) + ": " + num(fit.p_star, 3);
  }
  return pass("peak in (" + num(kUncorrPeakLo) + ", " + num(kUncorrPeakHi) +
              ") at " + stars);
}

// 6. Diffusing walkers push the peak to roughly twice the rate, and the
//    peak height grows with system size.

Result criterion_6() {
  const std::vector<double> ps = {0.27, 0.29, 0.31, 0.33, 0.35, 0.37, 0.39};
  const size_t samples = 2000;  // per point, pinned minimum
  std::map<size_t, std::vector<PeakPoint>> curves;
  std::string stars;
  for (size_t n : {64, 128}) {
    curves[n] = ami_curve(ModelVariant::kDiffusive, n, ps, samples, 4.0,
                          6000 + n);
    PeakFit fit = peak_location(curves[n]);
    if (!(fit.p_star > kDiffPeakLo && fit.p_star < kDiffPeakHi)) {
      return fail("N=" + std::to_string(n) + " peak at " + num(fit.p_star) +
                  " outside (" + num(kDiffPeakLo) + ", " + num(kDiffPeakHi) +
                  ")");
    }
    stars += (stars.empty() ? "" : ", ") + std::string("N=") +
             std::to_string(n) + ": " + num(fit.p_star, 3);
  }
  // At p = 0.33 the ancilla mutual information must grow with N.
  auto at = [&](size_t n) {
    for (const auto& pt : curves[n]) {
      if (std::abs(pt.p - 0.33) < 1e-9) return pt;
    }
    return PeakPoint{};
  };
  PeakPoint a64 = at(64), a128 = at(128);
  if (!(a128.y > a64.y)) {
    return fail("AMI(0.33) fell with size: N=64 " + num(a64.y) + ", N=128 " +
                num(a128.y));
  }
  return pass("peak in (" + num(kDiffPeakLo) + ", " + num(kDiffPeakHi) +
              ") at " + stars + "; AMI(0.33) " + num(a64.y) + " -> " +
              num(a128.y));
}

// --------------------------------------------------------------------------
// 7. Rare-region tails below half the mean entropy discriminate the three
//    disorder classes at half the critical rate. Per-probe fractions carry a
//    sawtooth from the integer entropy threshold at early times, and the
//    uncorrelated exponential dies within a few tens of blocks, so the
//    fractions are pooled in geometric time bins (ratio 1.6 from t = 4) and
//    the uncorrelated case trades depth for breadth: many short histories.
//    Error weights count each history once per bin; repeated probes of one
//    history are correlated, not new draws.

Result criterion_7() {
  struct Case {
    ModelVariant variant;
    double p;
    double blocks;
    double cadence;
    size_t samples;
    double window_lo, window_hi;  // 0, 0 = full range
    TailModel expect;
    const char* label;
  };
  // The slow laws need the late decade, fitted after the early-time
  // transient (t < 12) and before the prefix entropy saturates (t > 250).
  // The uncorrelated exponential only survives to t ~ 55, so that case runs
  // many short histories probed every block and fits the full range.
  const std::vector<Case> cases = {
      {ModelVariant::kDiffusive, 0.165, 280.0, 2.0, 1500, 12.0, 250.0,
       TailModel::kSqrtT, "diffusive"},
      {ModelVariant::kUncorrelated, 0.08, 100.0, 1.0, 6000, 0.0, 0.0,
       TailModel::kLinearT, "uncorrelated"},
      {ModelVariant::kQuenched, 0.165, 280.0, 2.0, 1500, 12.0, 250.0,
       TailModel::kLogT, "quenched"},
  };
  const char* model_names[] = {"linear_t", "sqrt_t", "log_t"};
  std::string summary;
  for (const auto& c : cases) {
    ExperimentConfig cfg;
    cfg.protocol = Protocol::kGrowth;
    cfg.variant = c.variant;
    cfg.num_sites = 512;
    cfg.p = c.p;
    cfg.periodic = false;
    cfg.blocks = c.blocks;
    cfg.probe_cadence = c.cadence;
    cfg.growth_cut_halfwidth = 64;
    cfg.master_seed = 7000 + static_cast<uint64_t>(c.variant);
    std::map<double, std::vector<int64_t>> grid;
    for (uint64_t i = 0; i < c.samples; i++) {
      TrajectoryRecord rec = run_trajectory(cfg, i);
      const ProbeSeries* s = rec.find_series("s_cut");
      if (s == nullptr) return fail("growth record lost its series");
      for (const auto& pt : s->points) {
        grid[pt.t].push_back(static_cast<int64_t>(pt.value));
      }
    }
    std::map<double, double> mean_at;
    for (const auto& [t, vals] : grid) {
      double sum = 0;
      for (int64_t v : vals) sum += static_cast<double>(v);
      mean_at[t] = sum / static_cast<double>(vals.size());
    }
    std::vector<TailPoint> pts;
    for (double lo = 4.0; lo < c.blocks; lo *= 1.6) {
      double hi = lo * 1.6;
      uint64_t hits = 0, count = 0;
      double t_first = 0, t_last = 0;
      for (const auto& [t, vals] : grid) {
        if (t < lo || t >= hi) continue;
        double half = mean_at[t] / 2.0;
        for (int64_t v : vals) {
          count++;
          if (static_cast<double>(v) < half) hits++;
        }
        if (t_first == 0) t_first = t;
        t_last = t;
      }
      if (hits > 0) {
        pts.push_back({std::sqrt(t_first * t_last),
                       static_cast<double>(hits) / static_cast<double>(count),
                       c.samples});
      }
    }
    TailRanking ranking;
    try {
      ranking = tail_scaling_discriminator(pts, c.window_lo, c.window_hi);
    } catch (const std::exception& e) {
      return fail(std::string(c.label) + ": " + e.what());
    }
    if (ranking.fits[0].model != c.expect) {
      const TailFit& expected =
          ranking.fits[1].model == c.expect ? ranking.fits[1]
                                            : ranking.fits[2];
      return fail(std::string(c.label) + ": best tail model is " +
                  model_names[static_cast<int>(ranking.fits[0].model)] +
                  " (chi2 " + num(ranking.fits[0].reduced_chi2, 3) +
                  "), expected " + model_names[static_cast<int>(c.expect)] +
                  " (chi2 " + num(expected.reduced_chi2, 3) + ")");
    }
    summary += (summary.empty() ? "" : "; ") + std::string(c.label) +
               " chi2 " + num(ranking.fits[0].reduced_chi2, 3) + " < " +
               num(ranking.fits[1].reduced_chi2, 3) + " over [" +
               num(ranking.window_lo, 3) + ", " + num(ranking.window_hi, 4) +
               "]";
  }
  return pass(summary);
}

// --------------------------------------------------------------------------
// 8. Deep in the area phase: purifying from the maximally mixed state, the
//    mean total entropy follows S(t) ~ (N / sqrt(D t)) exp(-a sqrt(D t)), so
//    log(S sqrt(D t) / N) is linear in sqrt(D t) between the early shoulder
//    (t < 4) and the final-qubit regime (t ~ N, where the survival
//    exponential takes over). The purification-time tail then decays
//    exponentially on the t / N clock with a size-independent rate; the
//    shoulder (u < 2) mixes slower modes whose weights are size dependent,
//    so the rate fit uses the deep tail only.

Result criterion_8() {
  std::string summary;
  for (size_t n : {64, 128, 256}) {
    ExperimentConfig cfg;
    cfg.protocol = Protocol::kPurification;
    cfg.variant = ModelVariant::kDiffusive;
    cfg.num_sites = n;
    cfg.p = 0.5;
    cfg.blocks = 12.0 * static_cast<double>(n);
    cfg.record_series = true;
    cfg.master_seed = 8000 + n;
    const size_t count = 400;
    auto recs = run_batch(cfg, count);
    std::map<double, double> sums;
    for (const auto& rec : recs) {
      const ProbeSeries* s = rec.find_series("entropy");
      if (s == nullptr) return fail("purification record lost its series");
      for (const auto& pt : s->points) sums[pt.t] += pt.value;
    }
    const double win_lo = 2.0;
    const double win_hi = 0.7 * std::sqrt(static_cast<double>(n));
    std::vector<std::pair<double, double>> pts;  // sqrt(D t), log(S x / N)
    for (const auto& [t, sum] : sums) {
      double m = sum / static_cast<double>(count);
      double x = std::sqrt(cfg.diffusivity * t);
      if (m <= 0 || x < win_lo || x > win_hi) continue;
      pts.emplace_back(x, std::log(m * x / static_cast<double>(n)));
    }
    if (pts.size() < 8) {
      return fail("N=" + std::to_string(n) + ": only " +
                  std::to_string(pts.size()) + " usable mean-entropy times");
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double m = static_cast<double>(pts.size());
    for (const auto& [x, y] : pts) {
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    double intercept = (sy - slope * sx) / m;
    double ss_res = 0, ss_tot = 0, ybar = sy / m;
    for (const auto& [x, y] : pts) {
      double r = y - intercept - slope * x;
      ss_res += r * r;
      ss_tot += (y - ybar) * (y - ybar);
    }
    double r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 0.0;
    if (slope >= 0) {
      return fail("N=" + std::to_string(n) + ": mean entropy not decaying, "
                  "slope " + num(slope));
    }
    if (r2 < kAreaFitMinR2) {
      return fail("N=" + std::to_string(n) + ": R^2 = " + num(r2) + " < " +
                  num(kAreaFitMinR2));
    }
    summary += "N=" + std::to_string(n) + " R2=" + num(r2, 3) + " ";
  }

  // Survival leg. The 1.2 rate-spread gate needs tight tails: with ~12
  // usable quarter-N bins past u = 2 the per-size rate error is ~3% at
  // these counts, leaving the gate ~4 sigma wide.
  std::vector<double> rates;
  for (size_t n : {64, 128, 256}) {
    ExperimentConfig cfg;
    cfg.protocol = Protocol::kPurification;
    cfg.variant = ModelVariant::kDiffusive;
    cfg.num_sites = n;
    cfg.p = 0.5;
    cfg.blocks = 12.0 * static_cast<double>(n);
    cfg.record_series = false;
    cfg.master_seed = 8100 + n;
    auto recs = run_batch(cfg, n == 256 ? 9000 : 6000);
    std::vector<double> tau;
    std::vector<uint8_t> censored;
    for (const auto& rec : recs) {
      tau.push_back(rec.scalar("tau_p").value_or(0));
      censored.push_back(rec.scalar("purified").value_or(0) != 1.0);
    }
    std::vector<double> grid;
    for (double u = 0.25; u <= 12.0 + 1e-9; u += 0.25) {
      grid.push_back(u * static_cast<double>(n));
    }
    auto curve = survival_tail(tau, censored, grid);
    std::vector<double> xs, ys, ws;
    for (const auto& pt : curve) {
      double u = pt.t / static_cast<double>(n);
      if (u >= 2.0 && pt.survival > 0 && pt.surviving >= 3) {
        xs.push_back(u);
        ys.push_back(-std::log(pt.survival));
        double sigma = std::max(pt.stderr_ / pt.survival, 1e-9);
        ws.push_back(1.0 / (sigma * sigma));
      }
    }
    if (xs.size() < 4) {
      return fail("N=" + std::to_string(n) +
                  ": not enough survival tail points");
    }
    double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
    for (size_t i = 0; i < xs.size(); i++) {
      sw += ws[i];
      swx += ws[i] * xs[i];
      swy += ws[i] * ys[i];
      swxx += ws[i] * xs[i] * xs[i];
      swxy += ws[i] * xs[i] * ys[i];
    }
    double det = sw * swxx - swx * swx;
    rates.push_back((sw * swxy - swx * swy) / det);
  }
  double rate_lo = *std::min_element(rates.begin(), rates.end());
  double rate_hi = *std::max_element(rates.begin(), rates.end());
  if (!(rate_lo > 0) || rate_hi / rate_lo > kRateSpreadMax) {
    return fail("survival rates " + num(rates[0]) + ", " + num(rates[1]) +
                ", " + num(rates[2]) + " spread beyond " +
                num(kRateSpreadMax));
  }
  return pass(summary + "; rates/N " + num(rates[0], 3) + ", " +
              num(rates[1], 3) + ", " + num(rates[2], 3) + " within " +
              num(100 * (kRateSpreadMax - 1), 2) + "%");
}

// --------------------------------------------------------------------------
// 9. The analysis stack re-derives planted truths.

Result criterion_9() {
  // Exact linear master curve collapses to machine precision.
  {
    CollapseProblem prob;
    prob.ansatz = CollapseAnsatz::kRescaled;
    for (double n : {16.0, 32.0, 64.0}) {
      for (double p : {0.10, 0.15, 0.20, 0.25, 0.30}) {
        double x = std::pow(n, 1.0 / 1.4) * (p - 0.2);
        prob.points.push_back({n, p, std::pow(n, 0.3) * (2 + 3 * x), 0.01});
      }
    }
    if (collapse_quality(prob, {0.2, 1.4, 0.3}) > 1e-15) {
      return fail("exact master curve has nonzero quality");
    }
  }
  // Noisy scaling family: recover (p_c, nu) within tolerance.
  {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> gauss;
    const double p_c = 0.33, nu = 1.6, beta = 0.4;
    CollapseProblem prob;
    prob.ansatz = CollapseAnsatz::kRescaled;
    for (double n : {16.0, 32.0, 64.0, 128.0}) {
      for (int ip = 0; ip <= 12; ip++) {
        double p = 0.25 + ip * (0.41 - 0.25) / 12;
        double x = std::pow(n, 1.0 / nu) * (p - p_c);
        double y = std::pow(n, beta) *
                   (1.0 / (1.0 + x * x) + 0.02 * gauss(rng));
        prob.points.push_back({n, p, y, 0.02 * std::pow(n, beta)});
      }
    }
    CollapseScan scan;
    scan.p_c = {0.29, 0.37, 17};
    scan.nu = {1.0, 2.4, 15};
    scan.beta = {0.2, 0.6, 9};
    scan.bootstraps = 0;
    CollapseFit fit = minimize_collapse(prob, scan);
    if (std::abs(fit.best.nu - nu) > kExponentTol * nu) {
      return fail("collapse nu " + num(fit.best.nu) + " vs planted " +
                  num(nu));
    }
    if (std::abs(fit.best.p_c - p_c) > 0.01) {
      return fail("collapse p_c " + num(fit.best.p_c) + " vs planted " +
                  num(p_c));
    }
  }
  // Quadratic peak: exact vertex.
  {
    std::vector<PeakPoint> pts;
    for (double p = 0.10; p < 0.23; p += 0.02) {
      pts.push_back({p, 0.9 - 40.0 * (p - 0.158) * (p - 0.158), 0.001});
    }
    PeakFit fit = peak_location(pts);
    if (std::abs(fit.p_star - 0.158) > 1e-8) {
      return fail("exact parabola vertex off by " +
                  num(std::abs(fit.p_star - 0.158)));
    }
  }
  // Dynamical exponents, power law and activated.
  {
    std::vector<SizeValue> pts;
    for (double n : {32.0, 64.0, 128.0, 256.0, 512.0}) {
      pts.push_back({n, 0.3 * n * n, 0.003 * n * n});
    }
    DynamicalFit fit = fit_dynamical_exponent(pts);
    if (std::abs(fit.z.value - 2.0) > kExponentTol * 2.0) {
      return fail("power-law z " + num(fit.z.value) + " vs planted 2");
    }
    std::vector<SizeValue> act;
    for (double n : {32.0, 64.0, 128.0, 256.0, 512.0}) {
      double v = 2.0 * std::exp(1.1 * std::pow(n, 0.44));
      act.push_back({n, v, 0.01 * v});
    }
    DynamicalFit afit = fit_dynamical_exponent(act);
    if (std::abs(afit.psi.value - 0.44) > kExponentTol * 0.44) {
      return fail("activated psi " + num(afit.psi.value) + " vs planted 0.44");
    }
    if (!(afit.activated_reduced_chi2 < afit.power_reduced_chi2)) {
      return fail("activated fit did not beat power law on activated data");
    }
  }
  // Tail discriminator on all three planted laws.
  {
    struct Planted {
      TailModel model;
      std::function<double(double)> p;
    };
    std::vector<Planted> laws = {
        {TailModel::kSqrtT, [](double t) { return std::exp(-0.25 * std::sqrt(t)); }},
        {TailModel::kLinearT, [](double t) { return std::exp(-0.008 * t); }},
        {TailModel::kLogT, [](double t) { return std::pow(t / 8.0, -1.1); }},
    };
    for (const auto& law : laws) {
      std::vector<TailPoint> pts;
      for (double t = 10; t < 1100; t *= 1.25) {
        pts.push_back({t, law.p(t), 1000000});
      }
      TailRanking r = tail_scaling_discriminator(pts);
      if (r.fits[0].model != law.model) {
        return fail("tail discriminator missed a planted law");
      }
    }
  }
  // Wandering exponent, exact and from bridge statistics.
  {
    std::vector<SizeValue> pts;
    for (double n : {32.0, 64.0, 128.0, 256.0}) {
      pts.push_back({n, 2.0 * std::pow(n, 0.415), 1e-4});
    }
    WanderingFit fit = wandering_exponent(pts);
    if (std::abs(fit.beta.value - 0.415) > 1e-4) {
      return fail("exact wandering beta " + num(fit.beta.value));
    }
    // Uncorrelated half filling wanders as sqrt(N).
    std::mt19937_64 rng(99);
    std::vector<SizeValue> bridge;
    for (size_t n : {64, 128, 256, 512}) {
      std::vector<double> vars;
      for (int i = 0; i < 1500; i++) {
        auto cfgm = MeasurerConfiguration::random_half_filled(
            n, 1.0, SsepBoundary::kPeriodic, rng);
        vars.push_back(height_function(cfgm.occupancy()).variance);
      }
      double mv = mean_of(vars);
      bridge.push_back({static_cast<double>(n), std::sqrt(mv),
                        stderr_of(vars) / (2 * std::sqrt(mv))});
    }
    WanderingFit bf = wandering_exponent(bridge);
    if (std::abs(bf.beta.value - 0.5) > 0.03) {
      return fail("random-filling wandering beta " + num(bf.beta.value) +
                  " vs 1/2");
    }
  }
  // Distribution utilities with closed-form answers.
  {
    double p = ks_one_sided_pvalue({0.0, 1.0}, {2.0, 3.0});
    if (std::abs(p - std::exp(-2.0)) > 1e-12) {
      return fail("KS closed form violated");
    }
    std::vector<double> v;
    for (int i = 1; i <= 25; i++) v.push_back(i);
    MedianEstimate med = median_with_interval(v, 0.95);
    if (med.median != 13 || med.lo != 8 || med.hi != 18) {
      return fail("median order statistics off");
    }
  }
  return pass("collapse, peak, z, psi, tails, wandering, KS, median all "
              "within tolerance (10% exponents, exact where noiseless)");
}

// --------------------------------------------------------------------------
// 10. Code lengths: logical intervals overlap, staircase validation holds,
//     and the shortest length stays away from zero.

Result criterion_10() {
  ExperimentConfig cfg;
  cfg.protocol = Protocol::kCodeLength;
  cfg.variant = ModelVariant::kDiffusive;
  cfg.num_sites = 64;
  cfg.p = 0.33;
  cfg.validate_code_steps = true;  // throws inside the run on any mismatch
  cfg.master_seed = 10;
  size_t entangled = 0, probes = 0, zeros = 0;
  double violations = 0;
  for (uint64_t i = 0; i < 200; i++) {
    TrajectoryRecord rec;
    try {
      rec = run_trajectory(cfg, i);
    } catch (const std::exception& e) {
      return fail(std::string("staircase validation threw: ") + e.what());
    }
    if (rec.scalar("entangled").value_or(0) != 1.0) continue;
    entangled++;
    violations += rec.scalar("overlap_violations").value_or(0);
    const ProbeSeries* dmin = rec.find_series("d_min");
    if (dmin == nullptr) continue;
    for (const auto& pt : dmin->points) {
      probes++;
      if (pt.value == 0) zeros++;
    }
  }
  if (entangled < 100) {
    return fail("only " + std::to_string(entangled) +
                " of 200 trajectories reached the encoded qubit");
  }
  if (violations != 0) {
    return fail(num(violations) + " non-overlapping logical interval pairs");
  }
  if (probes == 0) return fail("no code-length probes recorded");
  double frac = static_cast<double>(zeros) / static_cast<double>(probes);
  double bound = 2.0 * std::sqrt(frac * (1 - frac) /
                                 static_cast<double>(probes));
  if (zeros != 0 && frac > bound) {
    return fail("zero-length fraction " + num(frac) +
                " not consistent with zero at 2 sigma");
  }
  return pass(std::to_string(entangled) + " encoded runs, " +
              std::to_string(probes) + " probes, overlaps always, " +
              std::to_string(zeros) + " zero lengths");
}

// --------------------------------------------------------------------------
// 11. Walker congestion at the purification moment: height wandering is
//     stochastically below random half filling and grows slower than
//     sqrt(N).

Result criterion_11() {
  std::map<size_t, std::vector<double>> variances;
  const std::vector<size_t> sizes = {32, 64, 96, 128};
  for (size_t n : sizes) {
    ExperimentConfig cfg;
    cfg.protocol = Protocol::kPurification;
    cfg.variant = ModelVariant::kDiffusive;
    cfg.num_sites = n;
    cfg.p = 0.33;
    cfg.record_series = false;
    cfg.master_seed = 1100 + n;
    auto recs = run_batch(cfg, 500);
    for (const auto& rec : recs) {
      if (rec.scalar("purified").value_or(0) != 1.0) continue;
      auto v = rec.scalar("w_variance_at_tau_p");
      if (v) variances[n].push_back(*v);
    }
    if (variances[n].size() < 300) {
      return fail("N=" + std::to_string(n) + ": only " +
                  std::to_string(variances[n].size()) +
                  " purified trajectories");
    }
  }
  // One-sided KS per stated size against matched random half filling.
  std::string ks_summary;
  for (size_t n : {32, 64, 128}) {
    std::mt19937_64 rng(0xACCE97ULL + n);
    std::vector<double> ref;
    for (size_t i = 0; i < variances[n].size(); i++) {
      auto cfgm = MeasurerConfiguration::random_half_filled(
          n, 1.0, SsepBoundary::kPeriodic, rng);
      ref.push_back(height_function(cfgm.occupancy()).variance);
    }
    double p = ks_one_sided_pvalue(variances[n], ref);
    if (!(p < kKsThreshold)) {
      return fail("N=" + std::to_string(n) + ": KS p=" + num(p) +
                  " does not show smaller wandering at " +
                  num(kKsThreshold));
    }
    ks_summary += "N=" + std::to_string(n) + " p=" + num(p, 2) + " ";
  }
  // Growth exponent over all four sizes.
  std::vector<SizeValue> fit_pts;
  for (size_t n : sizes) {
    double mv = mean_of(variances[n]);
    double sigma_w = std::sqrt(mv);
    fit_pts.push_back({static_cast<double>(n), sigma_w,
                       std::max(stderr_of(variances[n]) / (2 * sigma_w),
                                1e-9)});
  }
  WanderingFit wf = wandering_exponent(fit_pts);
  if (!(wf.beta.value + 2 * wf.beta.error < 0.5)) {
    return fail("beta = " + num(wf.beta.value) + " +- " +
                num(wf.beta.error) + " not below 1/2 at 2 sigma");
  }
  return pass(ks_summary + "(all < " + num(kKsThreshold) + "); beta = " +
              num(wf.beta.value, 3) + " +- " + num(wf.beta.error, 2) +
              " < 1/2");
}

// --------------------------------------------------------------------------

struct Criterion {
  int id;
  const char* name;
  Result (*run)();
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> table = {
      {1, "engine-vs-oracle", criterion_1},
      {2, "clipped-gauge-entropies", criterion_2},
      {3, "walker-stationarity", criterion_3},
      {4, "charge-conservation-no-go", criterion_4},
      {5, "uncorrelated-ami-peak", criterion_5},
      {6, "diffusive-ami-peak", criterion_6},
      {7, "rare-region-tail-classes", criterion_7},
      {8, "area-phase-decay-and-survival", criterion_8},
      {9, "analysis-recovers-planted-truth", criterion_9},
      {10, "code-length-contracts", criterion_10},
      {11, "hyperuniform-walker-heights", criterion_11},
  };
  return table;
}

}  // namespace
}  // namespace diffmon

int main(int argc, char** argv) {
  CLI::App app{"diffmon acceptance gate"};
  std::vector<int> selected;
  bool list = false;
  app.add_option("--criterion", selected,
                 "criterion numbers to run (default: all)");
  app.add_flag("--list", list, "list criteria and exit");
  CLI11_PARSE(app, argc, argv);

  if (list) {
    for (const auto& c : diffmon::criteria()) {
      std::cout << c.id << " " << c.name << "\n";
    }
    return 0;
  }

  int failures = 0;
  auto t_all = std::chrono::steady_clock::now();
  for (const auto& c : diffmon::criteria()) {
    if (!selected.empty() &&
        std::find(selected.begin(), selected.end(), c.id) == selected.end()) {
      continue;
    }
    auto t0 = std::chrono::steady_clock::now();
    diffmon::Result r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << c.id << " " << c.name
              << ": " << r.detail << "  [" << std::fixed
              << std::setprecision(1) << dt << " s]\n"
              << std::defaultfloat << std::flush;
    if (!r.pass) failures++;
  }
  double dt =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_all)
          .count();
  std::cout << "acceptance: " << (failures == 0 ? "PASS" : "FAIL") << " ["
            << std::fixed << std::setprecision(1) << dt << " s total]\n";
  return failures;
}
