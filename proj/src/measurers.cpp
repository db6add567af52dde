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

#include "diffmon/measurers.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace diffmon {

MeasurerConfiguration MeasurerConfiguration::random_half_filled(
    size_t num_sites, double diffusivity, SsepBoundary boundary,
    std::mt19937_64& rng) {
  std::vector<size_t> sites(num_sites);
  std::iota(sites.begin(), sites.end(), 0);
  std::shuffle(sites.begin(), sites.end(), rng);
  std::vector<uint8_t> occ(num_sites, 0);
  for (size_t i = 0; i < num_sites / 2; i++) {
    occ[sites[i]] = 1;
  }
  return from_occupancy(std::move(occ), diffusivity, boundary);
}

MeasurerConfiguration MeasurerConfiguration::random_dimers(
    size_t num_sites, double diffusivity, SsepBoundary boundary,
    std::mt19937_64& rng) {
  size_t num_dimers = num_sites / 8;
  if (num_sites < 8 || num_sites % 8 != 0) {
    throw std::invalid_argument("dimer variant needs num_sites divisible by 8");
  }
  // Rejection sampling keeps the placement exactly uniform over valid
  // configurations; acceptance is comfortable at quarter filling for the
  // sizes we run.
  std::uniform_int_distribution<size_t> pick(0, num_sites - 1);
  for (int attempt = 0; attempt < 1000000; attempt++) {
    std::vector<uint8_t> occ(num_sites, 0);
    bool ok = true;
    for (size_t d = 0; d < num_dimers && ok; d++) {
      size_t left = pick(rng);
      size_t right = (left + 1) % num_sites;
      if (boundary == SsepBoundary::kClosed && left + 1 >= num_sites) {
        ok = false;
        break;
      }
      if (occ[left] || occ[right]) {
        ok = false;
        break;
      }
      occ[left] = occ[right] = 1;
    }
    if (ok) {
      return from_occupancy(std::move(occ), diffusivity, boundary);
    }
  }
  throw std::runtime_error("dimer placement rejection sampling did not land");
}

MeasurerConfiguration MeasurerConfiguration::from_occupancy(
    std::vector<uint8_t> occupancy, double diffusivity, SsepBoundary boundary) {
  if (diffusivity <= 0) {
    throw std::invalid_argument("diffusivity must be positive");
  }
  MeasurerConfiguration c;
  c.occupancy_ = std::move(occupancy);
  c.diffusivity_ = diffusivity;
  c.boundary_ = boundary;
  return c;
}

size_t MeasurerConfiguration::particle_count() const {
  return static_cast<size_t>(
      std::count(occupancy_.begin(), occupancy_.end(), uint8_t{1}));
}

std::vector<size_t> MeasurerConfiguration::collect_positions() const {
  std::vector<size_t> pos;
  for (size_t s = 0; s < occupancy_.size(); s++) {
    if (occupancy_[s]) pos.push_back(s);
  }
  return pos;
}

std::vector<size_t> MeasurerConfiguration::collect_dimers() const {
  // Greedy pairing from an empty anchor; runs of odd length are malformed.
  size_t n = occupancy_.size();
  size_t anchor = 0;
  while (anchor < n && occupancy_[anchor]) anchor++;
  if (anchor == n) {
    throw std::invalid_argument("dimer layout must leave at least one gap");
  }
  std::vector<size_t> dimers;
  size_t i = 0;
  while (i < n) {
    size_t s = (anchor + 1 + i) % n;
    if (!occupancy_[s]) {
      i++;
      continue;
    }
    size_t next = (s + 1) % n;
    if (!occupancy_[next]) {
      throw std::invalid_argument("occupancy does not decompose into dimers");
    }
    dimers.push_back(s);
    i += 2;
  }
  return dimers;
}

void MeasurerConfiguration::ssep_advance(double dt, std::mt19937_64& rng) {
  if (dt <= 0) {
    throw std::invalid_argument("advance needs positive dt");
  }
  double end = clock_ + dt;
  std::vector<size_t> pos = collect_positions();
  if (pos.empty()) {
    clock_ = end;
    return;
  }
  size_t n = occupancy_.size();
  double rate = diffusivity_ * static_cast<double>(pos.size());
  std::exponential_distribution<double> wait(rate);
  std::uniform_int_distribution<size_t> pick(0, pos.size() - 1);
  for (;;) {
    double t = clock_ + wait(rng);
    if (t >= end) break;
    clock_ = t;
    events_++;
    size_t i = pick(rng);
    bool right = rng() & 1;
    size_t from = pos[i];
    size_t to;
    if (boundary_ == SsepBoundary::kPeriodic) {
      to = right ? (from + 1) % n : (from + n - 1) % n;
    } else {
      if ((right && from + 1 >= n) || (!right && from == 0)) continue;
      to = right ? from + 1 : from - 1;
    }
    if (occupancy_[to]) continue;
    occupancy_[from] = 0;
    occupancy_[to] = 1;
    pos[i] = to;
  }
  clock_ = end;
}

void MeasurerConfiguration::dimer_advance(double dt, std::mt19937_64& rng) {
  if (dt <= 0) {
    throw std::invalid_argument("advance needs positive dt");
  }
  double end = clock_ + dt;
  std::vector<size_t> dimers = collect_dimers();
  if (dimers.empty()) {
    clock_ = end;
    return;
  }
  size_t n = occupancy_.size();
  double rate = diffusivity_ * static_cast<double>(dimers.size());
  std::exponential_distribution<double> wait(rate);
  std::uniform_int_distribution<size_t> pick(0, dimers.size() - 1);
  for (;;) {
    double t = clock_ + wait(rng);
    if (t >= end) break;
    clock_ = t;
    events_++;
    size_t i = pick(rng);
    bool right = rng() & 1;
    size_t a = dimers[i];           // left site of the pair
    size_t b = (a + 1) % n;         // right site
    if (boundary_ == SsepBoundary::kClosed) {
      if ((right && b + 1 >= n) || (!right && a == 0)) continue;
      size_t target = right ? b + 1 : a - 1;
      if (occupancy_[target]) continue;
      occupancy_[right ? a : b] = 0;
      occupancy_[target] = 1;
      dimers[i] = right ? b : a - 1;
    } else {
      size_t target = right ? (b + 1) % n : (a + n - 1) % n;
      if (occupancy_[target]) continue;
      occupancy_[right ? a : b] = 0;
      occupancy_[target] = 1;
      dimers[i] = right ? b : target;
    }
  }
  clock_ = end;
}

std::vector<uint8_t> quenched_layout(size_t num_sites, std::mt19937_64& rng) {
  std::vector<size_t> sites(num_sites);
  std::iota(sites.begin(), sites.end(), 0);
  std::shuffle(sites.begin(), sites.end(), rng);
  std::vector<uint8_t> occ(num_sites, 0);
  for (size_t i = 0; i < num_sites / 2; i++) {
    occ[sites[i]] = 1;
  }
  return occ;
}

std::vector<size_t> sample_pattern_occupied(
    const std::vector<uint8_t>& occupancy, double p, std::mt19937_64& rng) {
  std::vector<size_t> pattern;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (size_t s = 0; s < occupancy.size(); s++) {
    if (occupancy[s] && unif(rng) < p) {
      pattern.push_back(s);
    }
  }
  return pattern;
}

std::vector<size_t> sample_pattern_all_sites(size_t num_sites, double p,
                                             std::mt19937_64& rng) {
  std::vector<size_t> pattern;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (size_t s = 0; s < num_sites; s++) {
    if (unif(rng) < p) {
      pattern.push_back(s);
    }
  }
  return pattern;
}

}  // namespace diffmon
