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

#ifndef DIFFMON_PROBES_HPP
#define DIFFMON_PROBES_HPP

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "diffmon/stabilizer.hpp"

namespace diffmon {

// Entropy of half the chain. Open boundary: subsystem [0, cut). Periodic:
// the arc of length n/2 starting at cut (the complement is the other arc).
int64_t half_chain_entropy(const StabilizerState& state, bool periodic,
                           size_t cut);

// Antipodal mutual information S_A + S_B - S_{A u B} for two arcs of length
// n/8 whose centers sit n/2 apart on the ring. Needs n divisible by 8.
int64_t ami(const StabilizerState& state);

// Tripartite mutual information over three consecutive quarters A, B, C:
// S_A + S_B + S_C - S_AB - S_BC - S_AC + S_ABC. Needs n divisible by 4.
int64_t tripartite_i3(const StabilizerState& state);

struct FractionEstimate {
  double fraction = 0.0;
  double stderr_binomial = 0.0;
  size_t hits = 0;
  size_t total = 0;
};

// Fraction of samples exactly at zero.
FractionEstimate p_i3_zero(const std::vector<int64_t>& samples);

// Fraction of samples strictly below half the ensemble mean (the mean is
// taken over the same samples). An all-zero ensemble returns 0.
FractionEstimate tail_below_half_mean(const std::vector<int64_t>& samples);

struct SurvivalPoint {
  double t = 0.0;
  double survival = 0.0;      // P(tau > t)
  double stderr_ = 0.0;       // binomial band
  size_t surviving = 0;
  size_t total = 0;
};

// Empirical survival function of purification times on a fixed grid.
// Censored samples (never purified within the cap) count as tau > cap and
// keep every grid point at or below the cap honest.
std::vector<SurvivalPoint> survival_tail(const std::vector<double>& tau,
                                         const std::vector<uint8_t>& censored,
                                         const std::vector<double>& grid);

struct CodeLengths {
  // Shortest contiguous system interval supporting each logical component,
  // indexed X=0, Y=1, Z=2; lengths count system sites on the ring.
  std::array<int64_t, 3> length{};
  // Minimizing interval per component as (first system site, length).
  std::array<std::pair<size_t, size_t>, 3> interval{};
};

// Contiguous code lengths of the one-bit code carried by an ancilla-extended
// pure state (ancilla at site 0, system sites 1..n-1 treated as a ring).
// For every system rotation the clipped gauge puts exactly two generators
// against the ancilla; their right endpoints r1 <= r2 give the prefix
// lengths at which the first logical component (identified by the ancilla
// letter of the shorter row) and then the remaining two become supported.
// With validate set, the I(ancilla; prefix) staircase 0 -> 1 -> 2 is checked
// at the extracted breakpoints on every rotation.
CodeLengths code_lengths(const StabilizerState& extended, bool validate);

struct HeightStats {
  std::vector<int64_t> w;  // w[x] for x = 0..n, w[0] = 0
  double variance = 0.0;   // over x = 1..n
  bool balanced = false;   // w[n] == 0, forced at half filling
};

// Signed prefix sum of (-1)^occupancy; its variance measures how evenly the
// measurers cover the ring (sub-binomial variance means hyperuniform).
HeightStats height_function(const std::vector<uint8_t>& occupancy);

}  // namespace diffmon

#endif
