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

#include "diffmon/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "diffmon/measurers.hpp"
#include "diffmon/probes.hpp"
#include "diffmon/stabilizer.hpp"
#include "diffmon/u1.hpp"

namespace diffmon {

uint64_t derive_trajectory_seed(uint64_t master_seed, uint64_t index) {
  uint64_t z = master_seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double classical_relaxation_blocks(size_t num_sites) {
  double x = static_cast<double>(num_sites) / (2.0 * std::numbers::pi);
  return x * x;
}

std::vector<double> entropy_probe_grid(double cap_blocks) {
  std::vector<double> grid;
  for (double t = 1.0; t <= cap_blocks + 0.5; t *= 1.2) {
    double rounded = std::floor(t + 0.5);
    if (rounded > cap_blocks) break;
    if (grid.empty() || rounded > grid.back()) {
      grid.push_back(rounded);
    }
  }
  return grid;
}

namespace {

// One trajectory's mutable context: quantum state, classical measurers, and
// the shared rng stream everything draws from in a fixed order.
struct Driver {
  const ExperimentConfig& cfg;
  std::mt19937_64 rng;
  StabilizerState state;
  size_t system_sites;
  size_t offset = 0;  // 1 once an ancilla occupies site 0
  bool periodic;
  std::optional<MeasurerConfiguration> walkers;
  std::vector<uint8_t> quenched;
  uint64_t gates_applied = 0;
  uint64_t sites_measured = 0;
  double time = 0.0;  // blocks

  Driver(const ExperimentConfig& c, uint64_t index, bool pure_start,
         bool force_open)
      : cfg(c),
        rng(derive_trajectory_seed(c.master_seed, index)),
        state(c.num_sites),
        system_sites(c.num_sites),
        periodic(c.periodic && !force_open) {
    if (system_sites < 2 || system_sites % 2 != 0) {
      throw std::invalid_argument("need an even number of sites >= 2");
    }
    if (pure_start) {
      state = StabilizerState::random_product(system_sites, rng);
    }
    SsepBoundary sb =
        periodic ? SsepBoundary::kPeriodic : SsepBoundary::kClosed;
    switch (cfg.variant) {
      case ModelVariant::kDiffusive:
        walkers = MeasurerConfiguration::random_half_filled(
            system_sites, cfg.diffusivity, sb, rng);
        break;
      case ModelVariant::kDimer:
        walkers = MeasurerConfiguration::random_dimers(
            system_sites, cfg.diffusivity, sb, rng);
        break;
      case ModelVariant::kQuenched:
        quenched = quenched_layout(system_sites, rng);
        break;
      case ModelVariant::kUncorrelated:
      case ModelVariant::kU1Symmetric:
        break;
    }
  }

  void apply_bond(size_t a, size_t b) {
    CliffordGate g = cfg.variant == ModelVariant::kU1Symmetric
                         ? U1GateSet::default_set().sample(rng)
                         : CliffordGate::random_two_qubit(rng);
    state.apply_gate(GateTable::from_gate(g), offset + a, offset + b);
    gates_applied++;
  }

  // Even bonds at parity 0, odd bonds at parity 1; the wrap bond
  // (n-1, 0) exists only on the ring.
  void layer(int parity) {
    for (size_t i = parity; i + 1 < system_sites; i += 2) {
      apply_bond(i, i + 1);
    }
    if (parity == 1 && periodic) {
      apply_bond(system_sites - 1, 0);
    }
  }

  std::vector<size_t> sample_sites() {
    switch (cfg.variant) {
      case ModelVariant::kDiffusive:
      case ModelVariant::kDimer:
        return sample_pattern_occupied(walkers->occupancy(), cfg.p, rng);
      case ModelVariant::kQuenched:
        return sample_pattern_occupied(quenched, cfg.p, rng);
      case ModelVariant::kUncorrelated:
      case ModelVariant::kU1Symmetric:
        return sample_pattern_all_sites(system_sites, cfg.p, rng);
    }
    return {};
  }

  // Advances the classical process by half a block, samples the pattern,
  // and measures it. The optional rank stop is used by the code-length
  // protocol to freeze the epoch the moment one logical qubit is left.
  StabilizerState::EpochStats epoch(size_t stop_at_rank = SIZE_MAX,
                                    std::vector<uint32_t>* remaining =
                                        nullptr) {
    if (walkers) {
      if (cfg.variant == ModelVariant::kDimer) {
        walkers->dimer_advance(0.5, rng);
      } else {
        walkers->ssep_advance(0.5, rng);
      }
    }
    std::vector<size_t> pattern = sample_sites();
    std::vector<uint32_t> sites;
    sites.reserve(pattern.size());
    for (size_t s : pattern) {
      sites.push_back(static_cast<uint32_t>(offset + s));
    }
    auto stats = state.measure_epoch(sites, rng, stop_at_rank, remaining);
    sites_measured += sites.size() - (remaining ? remaining->size() : 0);
    return stats;
  }

  void block() {
    layer(0);
    epoch();
    time += 0.5;
    layer(1);
    epoch();
    time += 0.5;
  }

  void finish_record(TrajectoryRecord& rec) const {
    rec.add_scalar("gates_applied", static_cast<double>(gates_applied));
    rec.add_scalar("sites_measured", static_cast<double>(sites_measured));
    rec.add_scalar("blocks_run", time);
  }
};

bool pure_start_for(const ExperimentConfig& cfg, bool protocol_wants_pure) {
  switch (cfg.initial) {
    case InitialState::kProtocolDefault:
      return protocol_wants_pure;
    case InitialState::kRandomProduct:
      return true;
    case InitialState::kMaximallyMixed:
      return false;
  }
  return protocol_wants_pure;
}

double default_blocks(const ExperimentConfig& cfg, double multiple) {
  if (cfg.blocks > 0) return cfg.blocks;
  return std::max(2.0,
                  std::ceil(multiple * classical_relaxation_blocks(
                                           cfg.num_sites)));
}

bool ring_intervals_overlap(size_t n, std::pair<size_t, size_t> a,
                            std::pair<size_t, size_t> b) {
  for (size_t i = 0; i < a.second; i++) {
    size_t site = (a.first + i) % n;
    size_t rel = (site + n - b.first) % n;
    if (rel < b.second) return true;
  }
  return false;
}

std::vector<uint64_t> single_site_mask(size_t n, size_t site) {
  std::vector<uint64_t> mask(words_for(n), 0);
  set_bit(mask.data(), site, true);
  return mask;
}

}  // namespace

TrajectoryRecord run_steady_state(const ExperimentConfig& cfg,
                                  uint64_t index) {
  if (!cfg.periodic || cfg.num_sites % 8 != 0) {
    throw std::invalid_argument(
        "steady-state probes want a ring with sites divisible by 8");
  }
  if (!pure_start_for(cfg, true)) {
    throw std::invalid_argument("steady state wants a pure initial state");
  }
  Driver d(cfg, index, true, false);
  double total = default_blocks(cfg, 5.0);
  double window = std::min(cfg.tail_window, total / 2);
  double window_start = total - window;

  TrajectoryRecord rec;
  rec.trajectory_index = index;
  ProbeSeries ami_series{"ami", {}}, i3_series{"i3", {}},
      sh_series{"s_half", {}};
  double sum_ami = 0, sum_i3 = 0, sum_sh = 0;
  size_t zero_i3 = 0, tail_count = 0;

  double next_probe = cfg.probe_cadence;
  for (double b = 1; b <= total + 1e-9; b += 1) {
    d.block();
    if (d.time + 1e-9 < next_probe) continue;
    next_probe += cfg.probe_cadence;
    bool in_tail = d.time > window_start + 1e-9;
    if (!cfg.record_series && !in_tail) continue;
    auto a = static_cast<double>(ami(d.state));
    auto i3v = static_cast<double>(tripartite_i3(d.state));
    auto sh = static_cast<double>(half_chain_entropy(d.state, true, 0));
    if (cfg.record_series) {
      ami_series.points.push_back({d.time, a});
      i3_series.points.push_back({d.time, i3v});
      sh_series.points.push_back({d.time, sh});
    }
    if (in_tail) {
      sum_ami += a;
      sum_i3 += i3v;
      sum_sh += sh;
      zero_i3 += i3v == 0;
      tail_count++;
    }
  }
  if (cfg.record_series) {
    rec.series = {std::move(ami_series), std::move(i3_series),
                  std::move(sh_series)};
  }
  if (tail_count == 0) {
    throw std::logic_error("no probes landed in the averaging window");
  }
  rec.add_scalar("ami_tail_mean", sum_ami / tail_count);
  rec.add_scalar("i3_tail_mean", sum_i3 / tail_count);
  rec.add_scalar("s_half_tail_mean", sum_sh / tail_count);
  rec.add_scalar("i3_tail_zero_frac",
                 static_cast<double>(zero_i3) / tail_count);
  rec.add_scalar("tail_probe_count", static_cast<double>(tail_count));
  d.finish_record(rec);
  return rec;
}

TrajectoryRecord run_purification(const ExperimentConfig& cfg,
                                  uint64_t index) {
  if (pure_start_for(cfg, false)) {
    throw std::invalid_argument("purification wants the maximally mixed start");
  }
  Driver d(cfg, index, false, false);
  double cap = default_blocks(cfg, 200.0);
  std::vector<double> grid = entropy_probe_grid(cap);
  size_t gi = 0;

  TrajectoryRecord rec;
  rec.trajectory_index = index;
  ProbeSeries entropy_series{"entropy", {}};
  entropy_series.points.push_back(
      {0.0, static_cast<double>(d.state.entropy_total())});

  bool purified = false;
  double tau_p = cap, tau1_onset = -1;
  for (double b = 1; b <= cap + 1e-9 && !purified; b += 1) {
    for (int parity = 0; parity < 2; parity++) {
      d.layer(parity);
      d.epoch();
      d.time += 0.5;
      size_t s = d.state.entropy_total();
      if (tau1_onset < 0 && s <= 1) tau1_onset = d.time;
      if (s == 0) {
        purified = true;
        tau_p = d.time;
        break;
      }
    }
    while (gi < grid.size() && grid[gi] <= d.time + 1e-9) {
      entropy_series.points.push_back(
          {grid[gi], static_cast<double>(d.state.entropy_total())});
      gi++;
    }
  }
  if (purified && cfg.record_series) {
    // Zero for the rest of the grid keeps ensemble averages aligned.
    for (; gi < grid.size(); gi++) {
      entropy_series.points.push_back({grid[gi], 0.0});
    }
  }
  if (cfg.record_series) {
    rec.series.push_back(std::move(entropy_series));
  }

  rec.add_scalar("purified", purified ? 1.0 : 0.0);
  rec.add_scalar("tau_p", tau_p);
  rec.add_scalar("tau1_onset", tau1_onset);
  rec.add_scalar("tau1_dwell", tau1_onset >= 0 ? tau_p - tau1_onset : -1.0);
  rec.add_scalar("entropy_final",
                 static_cast<double>(d.state.entropy_total()));
  if (d.walkers) {
    rec.add_scalar("w_variance_at_tau_p",
                   height_function(d.walkers->occupancy()).variance);
  } else if (cfg.variant == ModelVariant::kQuenched) {
    rec.add_scalar("w_variance_at_tau_p",
                   height_function(d.quenched).variance);
  }
  d.finish_record(rec);
  return rec;
}

TrajectoryRecord run_growth(const ExperimentConfig& cfg, uint64_t index) {
  if (!pure_start_for(cfg, true)) {
    throw std::invalid_argument("growth wants a pure product start");
  }
  Driver d(cfg, index, true, /*force_open=*/true);
  size_t n = cfg.num_sites;
  size_t hw = std::min(cfg.growth_cut_halfwidth, n / 2 - 1);
  std::uniform_int_distribution<size_t> pick(n / 2 - hw, n / 2 + hw);
  size_t cut = std::clamp<size_t>(pick(d.rng), 1, n - 1);
  double total = cfg.blocks > 0 ? cfg.blocks : 400.0;

  TrajectoryRecord rec;
  rec.trajectory_index = index;
  ProbeSeries s_series{"s_cut", {}};
  double next_probe = cfg.probe_cadence;
  for (double b = 1; b <= total + 1e-9; b += 1) {
    d.block();
    if (d.time + 1e-9 < next_probe) continue;
    next_probe += cfg.probe_cadence;
    s_series.points.push_back(
        {d.time, static_cast<double>(d.state.entropy_interval(0, cut))});
  }
  rec.series.push_back(std::move(s_series));
  rec.add_scalar("cut_position", static_cast<double>(cut));
  d.finish_record(rec);
  return rec;
}

TrajectoryRecord run_codelength(const ExperimentConfig& cfg, uint64_t index) {
  if (cfg.variant != ModelVariant::kDiffusive &&
      cfg.variant != ModelVariant::kDimer) {
    throw std::invalid_argument("code lengths run on walker variants");
  }
  if (!cfg.periodic) {
    throw std::invalid_argument("code lengths want a ring");
  }
  Driver d(cfg, index, false, false);
  size_t n = cfg.num_sites;
  double cap = default_blocks(cfg, 200.0);

  TrajectoryRecord rec;
  rec.trajectory_index = index;
  ProbeSeries dx{"d_x", {}}, dy{"d_y", {}}, dz{"d_z", {}}, dmin{"d_min", {}};
  double t_entangle = -1, t_disentangle = -1;
  size_t overlap_violations = 0;
  bool extended = false;
  int parity = 0;

  // Phase one: monitor the mixed state down to a single logical qubit,
  // stopping mid-epoch the moment the rank hits n-1.
  while (d.time + 1e-9 < cap && !extended) {
    d.layer(parity);
    std::vector<uint32_t> remaining;
    d.epoch(n - 1, &remaining);
    d.time += 0.5;
    parity ^= 1;
    if (d.state.num_generators() == n - 1) {
      auto [lx, lz] = d.state.logical_pair();
      d.state = d.state.extended_with_ancilla(lx, lz);
      d.offset = 1;
      extended = true;
      t_entangle = d.time;
      if (!remaining.empty()) {
        // The interrupted epoch finishes on the encoded state; the sites
        // were scheduled before the ancilla was adjoined, so shift them.
        std::vector<uint32_t> shifted;
        shifted.reserve(remaining.size());
        for (uint32_t s : remaining) shifted.push_back(s + 1);
        d.state.measure_epoch(shifted, d.rng);
        d.sites_measured += shifted.size();
      }
    }
  }
  if (!extended) {
    rec.add_scalar("entangled", 0.0);
    rec.add_scalar("t_entangle", -1.0);
    rec.add_scalar("t_disentangle", -1.0);
    rec.add_scalar("overlap_violations", 0.0);
    d.finish_record(rec);
    return rec;
  }

  // Phase two: keep the circuit running on the system ring (parity picks up
  // where the interrupted block left off) and track the contiguous code
  // lengths until the ancilla disentangles.
  auto anc_mask = single_site_mask(n + 1, 0);
  double next_probe = d.time + cfg.probe_cadence;
  while (d.time + 1e-9 < cap) {
    d.layer(parity);
    d.epoch();
    d.time += 0.5;
    parity ^= 1;
    if (d.state.entropy_region(anc_mask) == 0) {
      t_disentangle = d.time;
      break;
    }
    if (d.time + 1e-9 < next_probe) continue;
    next_probe += cfg.probe_cadence;
    CodeLengths cl = code_lengths(d.state, cfg.validate_code_steps);
    dx.points.push_back({d.time, static_cast<double>(cl.length[0])});
    dy.points.push_back({d.time, static_cast<double>(cl.length[1])});
    dz.points.push_back({d.time, static_cast<double>(cl.length[2])});
    dmin.points.push_back(
        {d.time, static_cast<double>(
                     *std::min_element(cl.length.begin(), cl.length.end()))});
    for (size_t a = 0; a < 3; a++) {
      for (size_t bb = a + 1; bb < 3; bb++) {
        if (!ring_intervals_overlap(n, cl.interval[a], cl.interval[bb])) {
          overlap_violations++;
        }
      }
    }
  }
  rec.series = {std::move(dx), std::move(dy), std::move(dz), std::move(dmin)};
  rec.add_scalar("entangled", 1.0);
  rec.add_scalar("t_entangle", t_entangle);
  rec.add_scalar("t_disentangle", t_disentangle);
  rec.add_scalar("overlap_violations",
                 static_cast<double>(overlap_violations));
  d.finish_record(rec);
  return rec;
}

TrajectoryRecord run_u1(const ExperimentConfig& cfg, uint64_t index) {
  if (cfg.variant != ModelVariant::kU1Symmetric) {
    throw std::invalid_argument("u1 protocol wants the u1_symmetric variant");
  }
  Driver d(cfg, index, false, false);
  size_t n = cfg.num_sites;
  double cap = cfg.blocks > 0
                   ? cfg.blocks
                   : std::ceil(100.0 * std::log2(static_cast<double>(n)) /
                               cfg.p);

  auto undetermined = [&]() {
    size_t count = 0;
    for (size_t s = 0; s < n; s++) {
      count += d.state.membership_sign(
                   PauliOperator::single_site(n, s, 'Z')) == 0;
    }
    return count;
  };

  TrajectoryRecord rec;
  rec.trajectory_index = index;
  bool purified = false;
  double tau_p = cap;
  size_t monotone_violations = 0;
  size_t prev_undetermined = undetermined();
  for (double b = 1; b <= cap + 1e-9 && !purified; b += 1) {
    for (int parity = 0; parity < 2; parity++) {
      d.layer(parity);
      d.epoch();
      d.time += 0.5;
      if (d.state.pure()) {
        purified = true;
        tau_p = d.time;
        break;
      }
    }
    size_t now = undetermined();
    if (now > prev_undetermined) monotone_violations++;
    prev_undetermined = now;
  }

  bool product_z = d.state.pure();
  for (size_t g = 0; product_z && g < d.state.num_generators(); g++) {
    PauliOperator op = d.state.generator(g);
    product_z = op.weight() == 1;
    for (size_t s = 0; product_z && s < n; s++) {
      char l = op.letter(s);
      product_z = l == 'I' || l == 'Z';
    }
  }
  rec.add_scalar("purified", purified ? 1.0 : 0.0);
  rec.add_scalar("tau_p", tau_p);
  rec.add_scalar("product_z_final", product_z ? 1.0 : 0.0);
  rec.add_scalar("monotone_violations",
                 static_cast<double>(monotone_violations));
  rec.add_scalar("undetermined_final",
                 static_cast<double>(prev_undetermined));
  d.finish_record(rec);
  return rec;
}

TrajectoryRecord run_trajectory(const ExperimentConfig& cfg, uint64_t index) {
  switch (cfg.protocol) {
    case Protocol::kSteadyState:
      return run_steady_state(cfg, index);
    case Protocol::kPurification:
      return run_purification(cfg, index);
    case Protocol::kGrowth:
      return run_growth(cfg, index);
    case Protocol::kCodeLength:
      return run_codelength(cfg, index);
    case Protocol::kU1:
      return run_u1(cfg, index);
  }
  throw std::invalid_argument("unknown protocol");
}

}  // namespace diffmon
