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

#ifndef DIFFMON_EXPERIMENT_HPP
#define DIFFMON_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace diffmon {

enum class ModelVariant {
  kDiffusive,     // SSEP walkers gate the measurements
  kUncorrelated,  // every site a candidate each epoch
  kQuenched,      // frozen random half filling
  kDimer,         // rigid SSEP pairs
  kU1Symmetric,   // charge-conserving gates, uncorrelated measurements
};

enum class Protocol {
  kSteadyState,   // long run, AMI / I3 / half-chain probes, tail averages
  kPurification,  // maximally mixed start, entropy decay and tau_P
  kGrowth,        // open chain from a product state, S(t) at a near-center cut
  kCodeLength,    // purify to one bit, adjoin ancilla, track code lengths
  kU1,            // charge-conserving circuit, purify to a Z product state
};

enum class InitialState { kProtocolDefault, kRandomProduct, kMaximallyMixed };

struct ExperimentConfig {
  size_t num_sites = 64;
  double p = 0.16;
  double diffusivity = 1.0;
  ModelVariant variant = ModelVariant::kDiffusive;
  Protocol protocol = Protocol::kSteadyState;
  bool periodic = true;
  InitialState initial = InitialState::kProtocolDefault;
  // Horizon in blocks; 0 picks the protocol default (see run_* docs).
  double blocks = 0.0;
  // Blocks between probe evaluations.
  double probe_cadence = 2.0;
  // Steady state: length (time units) of the closing time-average window.
  double tail_window = 1000.0;
  // Growth: the cut is drawn uniformly within this distance of the center.
  size_t growth_cut_halfwidth = 64;
  bool record_series = true;
  // Code lengths: check the I(ancilla; prefix) staircase on every rotation.
  bool validate_code_steps = true;
  uint64_t master_seed = 1;
  size_t samples = 100;
};

struct ProbePoint {
  double t = 0.0;
  double value = 0.0;
};

struct ProbeSeries {
  std::string name;
  std::vector<ProbePoint> points;
};

struct TrajectoryRecord {
  uint64_t trajectory_index = 0;
  std::string config_digest;  // filled by the persistence layer
  std::string rng_tag = "splitmix64+mt19937_64";
  std::vector<ProbeSeries> series;
  // Ordered so that serialization is deterministic.
  std::vector<std::pair<std::string, double>> scalars;

  void add_scalar(const std::string& name, double value) {
    scalars.emplace_back(name, value);
  }
  std::optional<double> scalar(const std::string& name) const {
    for (const auto& [k, v] : scalars) {
      if (k == name) return v;
    }
    return std::nullopt;
  }
  ProbeSeries* find_series(const std::string& name) {
    for (auto& s : series) {
      if (s.name == name) return &s;
    }
    return nullptr;
  }
  const ProbeSeries* find_series(const std::string& name) const {
    for (const auto& s : series) {
      if (s.name == name) return &s;
    }
    return nullptr;
  }
};

// Trajectory seed derivation: one splitmix64 scramble of the master seed and
// index, feeding a per-trajectory mt19937_64.
uint64_t derive_trajectory_seed(uint64_t master_seed, uint64_t index);

// Relaxation time of the slowest diffusive mode, (N / 2 pi)^2 blocks; the
// protocol horizons are multiples of it.
double classical_relaxation_blocks(size_t num_sites);

TrajectoryRecord run_steady_state(const ExperimentConfig& cfg, uint64_t index);
TrajectoryRecord run_purification(const ExperimentConfig& cfg, uint64_t index);
TrajectoryRecord run_growth(const ExperimentConfig& cfg, uint64_t index);
TrajectoryRecord run_codelength(const ExperimentConfig& cfg, uint64_t index);
TrajectoryRecord run_u1(const ExperimentConfig& cfg, uint64_t index);

// Dispatch on cfg.protocol.
TrajectoryRecord run_trajectory(const ExperimentConfig& cfg, uint64_t index);

// Shared time grid for entropy-decay series: geometric with ratio ~1.2,
// deduplicated integers, so records from different trajectories align.
std::vector<double> entropy_probe_grid(double cap_blocks);

}  // namespace diffmon

#endif
