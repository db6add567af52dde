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

#ifndef DIFFMON_MEASURERS_HPP
#define DIFFMON_MEASURERS_HPP

#include <cstdint>
#include <random>
#include <vector>

namespace diffmon {

enum class SsepBoundary { kPeriodic, kClosed };

// Classical hard-core random walkers whose positions gate the measurements.
// Continuous-time dynamics, simulated exactly: each walker (or rigid dimer)
// carries an independent rate-D Poisson clock; on a ring it picks left or
// right with equal probability and the move is rejected if the target is
// occupied or off a closed edge. Rejected moves still consume the event,
// which is what makes the uniform measure stationary.
class MeasurerConfiguration {
 public:
  static MeasurerConfiguration random_half_filled(size_t num_sites,
                                                  double diffusivity,
                                                  SsepBoundary boundary,
                                                  std::mt19937_64& rng);
  // Uniform non-overlapping placement of num_sites/8 adjacent pairs.
  static MeasurerConfiguration random_dimers(size_t num_sites,
                                             double diffusivity,
                                             SsepBoundary boundary,
                                             std::mt19937_64& rng);
  static MeasurerConfiguration from_occupancy(std::vector<uint8_t> occupancy,
                                              double diffusivity,
                                              SsepBoundary boundary);

  void ssep_advance(double dt, std::mt19937_64& rng);
  // Same walk performed by rigid two-site dimers with mutual exclusion.
  // The occupancy must decompose into adjacent disjoint pairs.
  void dimer_advance(double dt, std::mt19937_64& rng);

  const std::vector<uint8_t>& occupancy() const { return occupancy_; }
  size_t num_sites() const { return occupancy_.size(); }
  size_t particle_count() const;
  double clock() const { return clock_; }
  double diffusivity() const { return diffusivity_; }
  // Total Poisson clock rings so far, including rejected moves.
  uint64_t event_count() const { return events_; }

 private:
  std::vector<uint8_t> occupancy_;
  double clock_ = 0.0;
  double diffusivity_ = 1.0;
  SsepBoundary boundary_ = SsepBoundary::kPeriodic;
  uint64_t events_ = 0;

  std::vector<size_t> collect_positions() const;
  std::vector<size_t> collect_dimers() const;
};

// N/2 immobile measurer sites, chosen uniformly without replacement, frozen
// for the whole trajectory.
std::vector<uint8_t> quenched_layout(size_t num_sites, std::mt19937_64& rng);

// Each occupied site enters the pattern independently with probability p.
std::vector<size_t> sample_pattern_occupied(const std::vector<uint8_t>& occupancy,
                                            double p, std::mt19937_64& rng);

// Spacetime-uncorrelated variant: every site is a candidate.
std::vector<size_t> sample_pattern_all_sites(size_t num_sites, double p,
                                             std::mt19937_64& rng);

}  // namespace diffmon

#endif
