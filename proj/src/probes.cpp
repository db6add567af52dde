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

#include "diffmon/probes.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "diffmon/clipped.hpp"

namespace diffmon {

namespace {

std::vector<uint64_t> region_mask(size_t n, const std::vector<size_t>& sites) {
  std::vector<uint64_t> mask(words_for(n), 0);
  for (size_t s : sites) {
    set_bit(mask.data(), s, true);
  }
  return mask;
}

int64_t entropy_of_sites(const StabilizerState& state,
                         const std::vector<size_t>& sites) {
  auto mask = region_mask(state.num_sites(), sites);
  return static_cast<int64_t>(state.entropy_region(mask));
}

std::vector<size_t> arc(size_t n, size_t start, size_t len) {
  std::vector<size_t> sites(len);
  for (size_t i = 0; i < len; i++) {
    sites[i] = (start + i) % n;
  }
  return sites;
}

}  // namespace

int64_t half_chain_entropy(const StabilizerState& state, bool periodic,
                           size_t cut) {
  size_t n = state.num_sites();
  if (!periodic) {
    return static_cast<int64_t>(state.entropy_interval(0, cut));
  }
  return entropy_of_sites(state, arc(n, cut, n / 2));
}

int64_t ami(const StabilizerState& state) {
  size_t n = state.num_sites();
  if (n % 8 != 0) {
    throw std::invalid_argument("antipodal regions need n divisible by 8");
  }
  auto a = arc(n, 0, n / 8);
  auto b = arc(n, n / 2, n / 8);
  auto ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  return entropy_of_sites(state, a) + entropy_of_sites(state, b) -
         entropy_of_sites(state, ab);
}

int64_t tripartite_i3(const StabilizerState& state) {
  size_t n = state.num_sites();
  if (n % 4 != 0) {
    throw std::invalid_argument("tripartite split needs n divisible by 4");
  }
  size_t q = n / 4;
  auto ent = [&](size_t start, size_t len) {
    return static_cast<int64_t>(state.entropy_interval(start, start + len));
  };
  auto a = arc(n, 0, q), c = arc(n, 2 * q, q);
  auto ac = a;
  ac.insert(ac.end(), c.begin(), c.end());
  return ent(0, q) + ent(q, q) + ent(2 * q, q) - ent(0, 2 * q) -
         ent(q, 2 * q) - entropy_of_sites(state, ac) + ent(0, 3 * q);
}

FractionEstimate p_i3_zero(const std::vector<int64_t>& samples) {
  if (samples.empty()) {
    throw std::invalid_argument("no samples");
  }
  FractionEstimate est;
  est.total = samples.size();
  for (int64_t s : samples) {
    est.hits += s == 0;
  }
  est.fraction = static_cast<double>(est.hits) / est.total;
  est.stderr_binomial =
      std::sqrt(est.fraction * (1 - est.fraction) / est.total);
  return est;
}

FractionEstimate tail_below_half_mean(const std::vector<int64_t>& samples) {
  if (samples.empty()) {
    throw std::invalid_argument("no samples");
  }
  double mean = std::accumulate(samples.begin(), samples.end(), 0.0) /
                samples.size();
  FractionEstimate est;
  est.total = samples.size();
  for (int64_t s : samples) {
    // Strict inequality: "suppressed by at least a factor of two" from the
    // mean. An all-zero ensemble therefore yields 0, not 1.
    est.hits += static_cast<double>(s) < mean / 2;
  }
  est.fraction = static_cast<double>(est.hits) / est.total;
  est.stderr_binomial =
      std::sqrt(est.fraction * (1 - est.fraction) / est.total);
  return est;
}

std::vector<SurvivalPoint> survival_tail(const std::vector<double>& tau,
                                         const std::vector<uint8_t>& censored,
                                         const std::vector<double>& grid) {
  if (tau.size() != censored.size()) {
    throw std::invalid_argument("sample/censor size mismatch");
  }
  std::vector<SurvivalPoint> out;
  out.reserve(grid.size());
  for (double t : grid) {
    SurvivalPoint pt;
    pt.t = t;
    pt.total = tau.size();
    for (size_t i = 0; i < tau.size(); i++) {
      pt.surviving += censored[i] || tau[i] > t;
    }
    pt.survival = pt.total ? static_cast<double>(pt.surviving) / pt.total : 0;
    pt.stderr_ =
        pt.total
            ? std::sqrt(pt.survival * (1 - pt.survival) / pt.total)
            : 0;
    out.push_back(pt);
  }
  return out;
}

namespace {

// Letter codes from ClippedGauge: 1 = X, 2 = Z, 3 = Y. Component indexing
// in CodeLengths: X = 0, Y = 1, Z = 2.
size_t component_of_letter(unsigned letter) {
  switch (letter) {
    case 1:
      return 0;
    case 3:
      return 1;
    case 2:
      return 2;
  }
  throw std::logic_error("identity letter where a logical flag was expected");
}

int64_t mutual_info_ancilla_prefix(const StabilizerState& state, size_t r) {
  if (r == 0) return 0;
  auto arc_sites = [&](bool with_ancilla) {
    std::vector<size_t> sites;
    if (with_ancilla) sites.push_back(0);
    for (size_t s = 1; s <= r; s++) sites.push_back(s);
    return sites;
  };
  int64_t s_anc = entropy_of_sites(state, {0});
  int64_t s_pref = entropy_of_sites(state, arc_sites(false));
  int64_t s_joint = entropy_of_sites(state, arc_sites(true));
  return s_anc + s_pref - s_joint;
}

}  // namespace

CodeLengths code_lengths(const StabilizerState& extended, bool validate) {
  size_t n_ext = extended.num_sites();
  if (n_ext < 2 || !extended.pure()) {
    throw std::invalid_argument("code lengths want an ancilla-extended pure state");
  }
  size_t n_sys = n_ext - 1;
  CodeLengths out;
  out.length = {static_cast<int64_t>(n_sys) + 1,
                static_cast<int64_t>(n_sys) + 1,
                static_cast<int64_t>(n_sys) + 1};
  for (size_t shift = 0; shift < n_sys; shift++) {
    // System site i moves to extended position 1 + (i - shift mod n_sys);
    // the ancilla stays put, so the rotated prefix of length L covers system
    // sites shift .. shift+L-1 on the ring.
    std::vector<size_t> perm(n_ext);
    perm[0] = 0;
    for (size_t i = 0; i < n_sys; i++) {
      perm[1 + i] = 1 + (i + n_sys - shift) % n_sys;
    }
    StabilizerState rotated = extended.permuted(perm);
    ClippedGauge gauge = ClippedGauge::from_state(rotated);

    size_t rows[2];
    size_t found = 0;
    for (size_t r = 0; r < gauge.num_generators(); r++) {
      if (gauge.left_end(r) == 0) {
        if (found == 2) {
          throw std::logic_error("more than two generators touch the ancilla");
        }
        rows[found++] = r;
      }
    }
    if (found != 2 || gauge.right_end(rows[0]) == 0 ||
        gauge.right_end(rows[1]) == 0) {
      throw std::logic_error("ancilla generators missing (disentangled?)");
    }
    size_t first = rows[0], second = rows[1];
    if (gauge.right_end(first) > gauge.right_end(second)) {
      std::swap(first, second);
    }
    size_t r1 = gauge.right_end(first);
    size_t r2 = gauge.right_end(second);
    size_t comp1 = component_of_letter(gauge.letter_at(first, 0));
    size_t comp2 = component_of_letter(gauge.letter_at(second, 0));
    size_t comp3 = component_of_letter(gauge.letter_at(first, 0) ^
                                       gauge.letter_at(second, 0));

    if (validate) {
      // The ancilla-prefix mutual information must step 0 -> 1 -> 2 exactly
      // at the extracted endpoints.
      if (r1 > 1 && mutual_info_ancilla_prefix(rotated, r1 - 1) != 0) {
        throw std::logic_error("mutual information nonzero before r1");
      }
      int64_t at_r1 = mutual_info_ancilla_prefix(rotated, r1);
      if (at_r1 != (r2 == r1 ? 2 : 1)) {
        throw std::logic_error("mutual information step at r1 wrong");
      }
      if (r2 > r1 && r2 - 1 > r1 &&
          mutual_info_ancilla_prefix(rotated, r2 - 1) != 1) {
        throw std::logic_error("mutual information plateau before r2 wrong");
      }
      if (mutual_info_ancilla_prefix(rotated, r2) != 2) {
        throw std::logic_error("mutual information not 2 at r2");
      }
    }

    auto consider = [&](size_t comp, size_t len) {
      if (static_cast<int64_t>(len) < out.length[comp]) {
        out.length[comp] = static_cast<int64_t>(len);
        out.interval[comp] = {shift, len};
      }
    };
    consider(comp1, r1);
    consider(comp2, r2);
    consider(comp3, r2);
  }
  return out;
}

HeightStats height_function(const std::vector<uint8_t>& occupancy) {
  size_t n = occupancy.size();
  HeightStats stats;
  stats.w.resize(n + 1);
  stats.w[0] = 0;
  for (size_t x = 1; x <= n; x++) {
    stats.w[x] = stats.w[x - 1] + (occupancy[x - 1] ? -1 : 1);
  }
  stats.balanced = stats.w[n] == 0;
  double mean = 0;
  for (size_t x = 1; x <= n; x++) mean += stats.w[x];
  mean /= n;
  double var = 0;
  for (size_t x = 1; x <= n; x++) {
    double d = stats.w[x] - mean;
    var += d * d;
  }
  stats.variance = var / n;
  return stats;
}

}  // namespace diffmon
