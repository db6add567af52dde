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

#ifndef DIFFMON_STABILIZER_HPP
#define DIFFMON_STABILIZER_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "diffmon/clifford.hpp"
#include "diffmon/pauli.hpp"

namespace diffmon {

// A pure or mixed stabilizer state on n sites, stored as k <= n independent
// commuting Hermitian generators (no destabilizers). Rows are bit-packed;
// k = 0 is the maximally mixed state and k = n a pure state.
//
// Group-membership queries go through a sign-tracked GF(2) row echelon that
// is cached and reused until a gate or a randomizing measurement touches the
// tableau, which makes batches of commuting Z measurements cheap.
class StabilizerState {
 public:
  explicit StabilizerState(size_t num_sites);  // maximally mixed
  static StabilizerState product_z(size_t num_sites);
  // Uniform single-site pauli eigenstate per site (letter and sign).
  static StabilizerState random_product(size_t num_sites,
                                        std::mt19937_64& rng);
  static StabilizerState from_generators(
      size_t num_sites, const std::vector<PauliOperator>& generators);

  size_t num_sites() const { return n_; }
  size_t num_generators() const { return k_; }
  size_t entropy_total() const { return n_ - k_; }
  bool pure() const { return k_ == n_; }

  void apply_gate(const GateTable& table, size_t site);
  void apply_gate(const GateTable& table, size_t site_a, size_t site_b);

  enum class MeasureCase { kCollapse, kDeterministic, kRankIncrease };
  struct MeasureResult {
    int outcome;  // +1 or -1
    MeasureCase kind;
  };
  MeasureResult measure_z(size_t site, std::mt19937_64& rng);

  struct EpochStats {
    uint32_t collapses = 0;
    uint32_t deterministic = 0;
    uint32_t rank_increases = 0;
  };
  // Measures Z on every listed site (deduplicated, processed in a fixed
  // order chosen for echelon reuse; the joint outcome distribution does not
  // depend on ordering because all the Z's commute). If stop_at_rank is
  // given and k reaches it, unprocessed sites are appended to *remaining
  // and the call returns early.
  EpochStats measure_epoch(std::span<const uint32_t> sites,
                           std::mt19937_64& rng,
                           size_t stop_at_rank = SIZE_MAX,
                           std::vector<uint32_t>* remaining = nullptr);

  // Entropy of an arbitrary site set, by rank of the generators restricted
  // to the complement: S_A = |A| - (k - rank). Mask is n bits.
  size_t entropy_region(std::span<const uint64_t> site_mask) const;
  size_t entropy_interval(size_t begin, size_t end) const;  // sites [begin,end)

  PauliOperator generator(size_t index) const;
  // +1 if p is in the group, -1 if -p is, 0 if neither.
  int membership_sign(const PauliOperator& p) const;

  // For k = n-1: a pair (l_x, l_z) commuting with the group, independent of
  // it, mutually anticommuting, both returned with + sign.
  std::pair<PauliOperator, PauliOperator> logical_pair() const;

  // Site i of the result is site (i + shift) mod n of this state.
  StabilizerState rotated(size_t shift) const;
  // Relabels sites: old site i becomes new_site_of_old[i].
  StabilizerState permuted(const std::vector<size_t>& new_site_of_old) const;
  // New state on n+1 sites: ancilla at index 0, this state's sites shifted
  // up by one. Adds generators X_anc (x) l_x and Z_anc (x) l_z; requires
  // k = n-1 and the two logicals on n sites.
  StabilizerState extended_with_ancilla(const PauliOperator& l_x,
                                        const PauliOperator& l_z) const;

  bool generators_commute() const;
  bool generators_independent() const;

  size_t words_per_row() const { return w_; }
  const uint64_t* row_x(size_t r) const { return xs_.data() + r * w_; }
  const uint64_t* row_z(size_t r) const { return zs_.data() + r * w_; }
  uint8_t row_sign(size_t r) const { return signs_[r]; }

 private:
  void append_row(const PauliOperator& p);
  void append_z_row(size_t site, int sign);
  void invalidate_cache() const { echelon_rows_ = 0; }
  void ensure_echelon() const;
  // Reduces candidate (cx, cz, phase t) in place against the echelon.
  // Returns the final phase; candidate is zero iff it was in the span.
  uint8_t echelon_reduce(uint64_t* cx, uint64_t* cz, uint8_t t) const;
  void echelon_insert(const uint64_t* cx, const uint64_t* cz,
                      uint8_t t) const;
  std::optional<size_t> leading_column(const uint64_t* cx,
                                       const uint64_t* cz) const;

  size_t n_ = 0, w_ = 0, k_ = 0;
  std::vector<uint64_t> xs_, zs_;  // capacity n rows, row-major
  std::vector<uint8_t> signs_;     // phase/2 per row

  // Echelon cache: rows with distinct leading columns (x plane columns
  // first, then z plane), sign-tracked. echelon_rows_ == 0 means invalid;
  // valid caches always mirror all k_ tableau rows.
  mutable size_t echelon_rows_ = 0;
  mutable std::vector<uint64_t> ech_x_, ech_z_;
  mutable std::vector<uint8_t> ech_sign_;
  mutable std::vector<int32_t> pivot_of_col_;
};

}  // namespace diffmon

#endif
