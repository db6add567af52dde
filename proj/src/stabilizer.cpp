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

#include "diffmon/stabilizer.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <stdexcept>

namespace diffmon {

namespace {

inline size_t first_set_column(const uint64_t* words, size_t num_words) {
  for (size_t w = 0; w < num_words; w++) {
    if (words[w]) {
      return w * 64 + static_cast<size_t>(std::countr_zero(words[w]));
    }
  }
  return SIZE_MAX;
}

}  // namespace

StabilizerState::StabilizerState(size_t num_sites)
    : n_(num_sites),
      w_(words_for(num_sites)),
      k_(0),
      xs_(num_sites * words_for(num_sites), 0),
      zs_(num_sites * words_for(num_sites), 0),
      signs_(num_sites, 0) {
  if (num_sites == 0) {
    throw std::invalid_argument("empty state");
  }
  pivot_of_col_.assign(2 * n_, -1);
  ech_x_.assign(n_ * w_, 0);
  ech_z_.assign(n_ * w_, 0);
  ech_sign_.assign(n_, 0);
}

StabilizerState StabilizerState::product_z(size_t num_sites) {
  StabilizerState state(num_sites);
  for (size_t i = 0; i < num_sites; i++) {
    state.append_z_row(i, +1);
  }
  return state;
}

StabilizerState StabilizerState::random_product(size_t num_sites,
                                                std::mt19937_64& rng) {
  StabilizerState state(num_sites);
  for (size_t i = 0; i < num_sites; i++) {
    uint64_t bits = rng();
    char letter = "XYZ"[bits % 3];
    int sign = (bits >> 32) & 1 ? -1 : +1;
    state.append_row(PauliOperator::single_site(num_sites, i, letter, sign));
  }
  return state;
}

StabilizerState StabilizerState::from_generators(
    size_t num_sites, const std::vector<PauliOperator>& generators) {
  StabilizerState state(num_sites);
  for (const PauliOperator& g : generators) {
    state.append_row(g);
  }
  if (!state.generators_commute() || !state.generators_independent()) {
    throw std::invalid_argument("generators must commute and be independent");
  }
  return state;
}

void StabilizerState::append_row(const PauliOperator& p) {
  if (p.num_sites() != n_ || !p.hermitian()) {
    throw std::invalid_argument("bad generator");
  }
  if (k_ >= n_) {
    throw std::logic_error("too many generators");
  }
  std::copy(p.x_data(), p.x_data() + w_, xs_.data() + k_ * w_);
  std::copy(p.z_data(), p.z_data() + w_, zs_.data() + k_ * w_);
  signs_[k_] = p.phase() == 2;
  k_++;
  invalidate_cache();
}

void StabilizerState::append_z_row(size_t site, int sign) {
  assert(k_ < n_);
  uint64_t* x = xs_.data() + k_ * w_;
  uint64_t* z = zs_.data() + k_ * w_;
  std::fill(x, x + w_, 0);
  std::fill(z, z + w_, 0);
  set_bit(z, site, true);
  signs_[k_] = sign < 0;
  k_++;
}

void StabilizerState::apply_gate(const GateTable& table, size_t site) {
  if (table.arity != 1) {
    throw std::invalid_argument("arity mismatch");
  }
  if (site >= n_) {
    throw std::invalid_argument("site out of range");
  }
  size_t word = site >> 6, bit = site & 63;
  uint64_t mask = uint64_t{1} << bit;
  for (size_t r = 0; r < k_; r++) {
    uint64_t& xw = xs_[r * w_ + word];
    uint64_t& zw = zs_[r * w_ + word];
    unsigned idx = ((xw >> bit) & 1) | (((zw >> bit) & 1) << 1);
    if (idx == 0) continue;
    xw = (xw & ~mask) | (static_cast<uint64_t>(table.out_x[idx] & 1) << bit);
    zw = (zw & ~mask) | (static_cast<uint64_t>(table.out_z[idx] & 1) << bit);
    signs_[r] ^= table.sign[idx];
  }
  invalidate_cache();
}

void StabilizerState::apply_gate(const GateTable& table, size_t site_a,
                                 size_t site_b) {
  if (table.arity != 2) {
    throw std::invalid_argument("arity mismatch");
  }
  if (site_a >= n_ || site_b >= n_ || site_a == site_b) {
    throw std::invalid_argument("bad gate sites");
  }
  size_t wa = site_a >> 6, ba = site_a & 63;
  size_t wb = site_b >> 6, bb = site_b & 63;
  uint64_t ma = uint64_t{1} << ba, mb = uint64_t{1} << bb;
  for (size_t r = 0; r < k_; r++) {
    uint64_t* x = xs_.data() + r * w_;
    uint64_t* z = zs_.data() + r * w_;
    unsigned idx = ((x[wa] >> ba) & 1) | (((z[wa] >> ba) & 1) << 1) |
                   (((x[wb] >> bb) & 1) << 2) | (((z[wb] >> bb) & 1) << 3);
    if (idx == 0) continue;
    uint8_t ox = table.out_x[idx], oz = table.out_z[idx];
    x[wa] = (x[wa] & ~ma) | (static_cast<uint64_t>(ox & 1) << ba);
    z[wa] = (z[wa] & ~ma) | (static_cast<uint64_t>(oz & 1) << ba);
    x[wb] = (x[wb] & ~mb) | (static_cast<uint64_t>((ox >> 1) & 1) << bb);
    z[wb] = (z[wb] & ~mb) | (static_cast<uint64_t>((oz >> 1) & 1) << bb);
    signs_[r] ^= table.sign[idx];
  }
  invalidate_cache();
}

StabilizerState::MeasureResult StabilizerState::measure_z(
    size_t site, std::mt19937_64& rng) {
  if (site >= n_) {
    throw std::invalid_argument("site out of range");
  }
  uint32_t s = static_cast<uint32_t>(site);
  EpochStats stats = measure_epoch(std::span<const uint32_t>(&s, 1), rng);
  // Recover the single outcome from the state: after any of the three
  // cases, +-Z_site is in the group and its sign is the outcome.
  PauliOperator z = PauliOperator::single_site(n_, site, 'Z');
  int sign = membership_sign(z);
  assert(sign != 0);
  MeasureCase kind = stats.collapses     ? MeasureCase::kCollapse
                     : stats.deterministic ? MeasureCase::kDeterministic
                                           : MeasureCase::kRankIncrease;
  return {sign, kind};
}

StabilizerState::EpochStats StabilizerState::measure_epoch(
    std::span<const uint32_t> sites, std::mt19937_64& rng,
    size_t stop_at_rank, std::vector<uint32_t>* remaining) {
  EpochStats stats;
  std::vector<uint32_t> pending(sites.begin(), sites.end());
  std::sort(pending.begin(), pending.end());
  pending.erase(std::unique(pending.begin(), pending.end()), pending.end());
  for (uint32_t s : pending) {
    if (s >= n_) {
      throw std::invalid_argument("site out of range");
    }
  }

  // Phase 1: repeatedly collapse the lowest pending site that anticommutes
  // with some generator (x bit set in its column). A collapse rewrites rows,
  // which can flip other pending sites between commuting and anticommuting,
  // so the scan is redone from scratch after each one.
  std::vector<uint64_t> pending_mask(w_, 0);
  for (uint32_t s : pending) {
    set_bit(pending_mask.data(), s, true);
  }
  std::vector<uint64_t> anti_acc(w_);
  while (true) {
    std::fill(anti_acc.begin(), anti_acc.end(), 0);
    for (size_t r = 0; r < k_; r++) {
      const uint64_t* x = xs_.data() + r * w_;
      for (size_t w = 0; w < w_; w++) {
        anti_acc[w] |= x[w] & pending_mask[w];
      }
    }
    size_t col = first_set_column(anti_acc.data(), w_);
    if (col == SIZE_MAX) break;

    uint32_t site = static_cast<uint32_t>(col);
    size_t word = site >> 6, bit = site & 63;
    size_t pivot = SIZE_MAX;
    for (size_t r = 0; r < k_; r++) {
      if ((xs_[r * w_ + word] >> bit) & 1) {
        pivot = r;
        break;
      }
    }
    assert(pivot != SIZE_MAX);
    // Repair every other anticommuting row by the pivot, then overwrite the
    // pivot row with (outcome) Z_site.
    for (size_t r = pivot + 1; r < k_; r++) {
      if ((xs_[r * w_ + word] >> bit) & 1) {
        uint8_t t = pauli_words::mul_accumulate(
            xs_.data() + r * w_, zs_.data() + r * w_, signs_[r] ? 2 : 0,
            xs_.data() + pivot * w_, zs_.data() + pivot * w_,
            signs_[pivot] ? 2 : 0, w_);
        assert((t & 1) == 0);
        signs_[r] = t == 2;
      }
    }
    int outcome = (rng() & 1) ? -1 : +1;
    uint64_t* px = xs_.data() + pivot * w_;
    uint64_t* pz = zs_.data() + pivot * w_;
    std::fill(px, px + w_, 0);
    std::fill(pz, pz + w_, 0);
    set_bit(pz, site, true);
    signs_[pivot] = outcome < 0;
    stats.collapses++;
    invalidate_cache();
    set_bit(pending_mask.data(), site, false);
    pending.erase(std::lower_bound(pending.begin(), pending.end(), site));
  }

  // Phase 2: every remaining site commutes with the whole group. For a pure
  // state the group is maximal abelian, so each such Z is already in it with
  // a definite sign: outcome fixed, state untouched, no solve needed.
  if (k_ == n_) {
    stats.deterministic += static_cast<uint32_t>(pending.size());
    return stats;
  }
  // Mixed state: decide case (b) vs (c) by GF(2) membership. The echelon
  // built once here stays valid across the batch; rank increases extend it
  // in place.
  if (!pending.empty()) {
    ensure_echelon();
    std::vector<uint64_t> cx(w_), cz(w_);
    for (size_t i = 0; i < pending.size(); i++) {
      uint32_t site = pending[i];
      std::fill(cx.begin(), cx.end(), 0);
      std::fill(cz.begin(), cz.end(), 0);
      set_bit(cz.data(), site, true);
      uint8_t t = echelon_reduce(cx.data(), cz.data(), 0);
      bool in_group = first_set_column(cx.data(), w_) == SIZE_MAX &&
                      first_set_column(cz.data(), w_) == SIZE_MAX;
      if (in_group) {
        // Z_site times the matched group element is (-1)^(t/2) identity,
        // so the premeasured value is fixed; nothing changes.
        assert(t == 0 || t == 2);
        stats.deterministic++;
      } else {
        int outcome = (rng() & 1) ? -1 : +1;
        append_z_row(site, outcome);
        // Keep the cache in sync: the reduced residual of the new row.
        uint8_t rt = (t + (outcome < 0 ? 2 : 0)) & 3;
        echelon_insert(cx.data(), cz.data(), rt);
        assert(echelon_rows_ == k_);
        stats.rank_increases++;
        if (k_ == stop_at_rank) {
          if (remaining) {
            remaining->assign(pending.begin() + i + 1, pending.end());
          }
          return stats;
        }
      }
    }
  }
  return stats;
}

void StabilizerState::ensure_echelon() const {
  if (echelon_rows_ == k_ && k_ > 0) return;
  std::fill(pivot_of_col_.begin(), pivot_of_col_.end(), -1);
  echelon_rows_ = 0;
  std::vector<uint64_t> cx(w_), cz(w_);
  for (size_t r = 0; r < k_; r++) {
    std::copy(xs_.begin() + r * w_, xs_.begin() + (r + 1) * w_, cx.begin());
    std::copy(zs_.begin() + r * w_, zs_.begin() + (r + 1) * w_, cz.begin());
    uint8_t t = echelon_reduce(cx.data(), cz.data(), signs_[r] ? 2 : 0);
    echelon_insert(cx.data(), cz.data(), t);
  }
  assert(echelon_rows_ == k_);
}

uint8_t StabilizerState::echelon_reduce(uint64_t* cx, uint64_t* cz,
                                        uint8_t t) const {
  while (true) {
    size_t col = first_set_column(cx, w_);
    bool x_plane = col != SIZE_MAX;
    if (!x_plane) {
      col = first_set_column(cz, w_);
      if (col == SIZE_MAX) return t;
      col += n_;
    }
    int32_t row = pivot_of_col_[col];
    if (row < 0) return t;
    t = pauli_words::mul_accumulate(cx, cz, t, ech_x_.data() + row * w_,
                                    ech_z_.data() + row * w_,
                                    ech_sign_[row] ? 2 : 0, w_);
  }
}

void StabilizerState::echelon_insert(const uint64_t* cx, const uint64_t* cz,
                                     uint8_t t) const {
  size_t col = first_set_column(cx, w_);
  if (col == SIZE_MAX) {
    col = first_set_column(cz, w_);
    assert(col != SIZE_MAX);
    col += n_;
  }
  assert(pivot_of_col_[col] < 0);
  assert((t & 1) == 0);
  size_t row = echelon_rows_++;
  std::copy(cx, cx + w_, ech_x_.begin() + row * w_);
  std::copy(cz, cz + w_, ech_z_.begin() + row * w_);
  ech_sign_[row] = t == 2;
  pivot_of_col_[col] = static_cast<int32_t>(row);
}

size_t StabilizerState::entropy_region(
    std::span<const uint64_t> site_mask) const {
  if (site_mask.size() != w_) {
    throw std::invalid_argument("mask size mismatch");
  }
  size_t region_size = 0;
  for (size_t w = 0; w < w_; w++) {
    region_size += std::popcount(site_mask[w]);
  }
  if (region_size == 0) return 0;

  // rank of the generators restricted to the complement of the region.
  std::vector<uint64_t> rows(2 * k_ * w_);
  std::vector<size_t> lead(k_);
  size_t rank = 0;
  for (size_t r = 0; r < k_; r++) {
    uint64_t* row = rows.data() + 2 * rank * w_;
    for (size_t w = 0; w < w_; w++) {
      row[w] = xs_[r * w_ + w] & ~site_mask[w];
      row[w_ + w] = zs_[r * w_ + w] & ~site_mask[w];
    }
    // Reduce against previous pivots.
    for (size_t p = 0; p < rank; p++) {
      const uint64_t* prow = rows.data() + 2 * p * w_;
      size_t c = lead[p];
      if ((row[c >> 6] >> (c & 63)) & 1) {
        for (size_t w = 0; w < 2 * w_; w++) row[w] ^= prow[w];
      }
    }
    size_t col = first_set_column(row, 2 * w_);
    if (col != SIZE_MAX) {
      lead[rank] = col;
      rank++;
    }
  }
  size_t dim_inside = k_ - rank;
  return region_size - dim_inside;
}

size_t StabilizerState::entropy_interval(size_t begin, size_t end) const {
  if (begin > end || end > n_) {
    throw std::invalid_argument("bad interval");
  }
  std::vector<uint64_t> mask(w_, 0);
  for (size_t i = begin; i < end; i++) {
    set_bit(mask.data(), i, true);
  }
  return entropy_region(mask);
}

PauliOperator StabilizerState::generator(size_t index) const {
  if (index >= k_) {
    throw std::invalid_argument("generator index out of range");
  }
  PauliOperator p(n_);
  std::copy(xs_.begin() + index * w_, xs_.begin() + (index + 1) * w_,
            p.x_data());
  std::copy(zs_.begin() + index * w_, zs_.begin() + (index + 1) * w_,
            p.z_data());
  p.set_phase(signs_[index] ? 2 : 0);
  return p;
}

int StabilizerState::membership_sign(const PauliOperator& p) const {
  if (p.num_sites() != n_ || !p.hermitian()) {
    throw std::invalid_argument("bad membership query");
  }
  for (size_t r = 0; r < k_; r++) {
    if (!pauli_words::commute(p.x_data(), p.z_data(), xs_.data() + r * w_,
                              zs_.data() + r * w_, w_)) {
      return 0;
    }
  }
  if (k_ == 0) return p.is_identity() ? (p.sign() > 0 ? +1 : 0) : 0;
  ensure_echelon();
  std::vector<uint64_t> cx(p.x_data(), p.x_data() + w_);
  std::vector<uint64_t> cz(p.z_data(), p.z_data() + w_);
  uint8_t t = echelon_reduce(cx.data(), cz.data(), p.phase());
  if (first_set_column(cx.data(), w_) != SIZE_MAX ||
      first_set_column(cz.data(), w_) != SIZE_MAX) {
    return 0;
  }
  // p times group element = (-1)^(t/2) identity, so p = (-1)^(t/2) element.
  return t == 0 ? +1 : -1;
}

std::pair<PauliOperator, PauliOperator> StabilizerState::logical_pair()
    const {
  if (k_ + 1 != n_) {
    throw std::invalid_argument("logical_pair wants exactly one encoded bit");
  }
  // Kernel of the symplectic commutation map: v commutes with row g iff
  // g_x . v_z + g_z . v_x = 0. Build the check matrix with planes swapped,
  // then extract a kernel basis from its RREF; finally quotient by the
  // stabilizer group and pick an independent pair of residues.
  //
  // Rows are stored as [w_ words of plane 1 | w_ words of plane 2], so
  // logical column c maps to bit position c for c < n and 64*w_ + (c - n)
  // for the second plane.
  size_t cols = 2 * n_, cw = 2 * w_;
  auto bitpos = [&](size_t col) {
    return col < n_ ? col : 64 * w_ + (col - n_);
  };
  auto col_bit = [&](const std::vector<uint64_t>& m, size_t row,
                     size_t col) -> bool {
    return get_bit(m.data() + row * cw, bitpos(col));
  };
  std::vector<uint64_t> check(k_ * cw, 0);
  for (size_t r = 0; r < k_; r++) {
    for (size_t w = 0; w < w_; w++) {
      check[r * cw + w] = zs_[r * w_ + w];        // first block: g_z (hits v_x)
      check[r * cw + w_ + w] = xs_[r * w_ + w];   // second block: g_x (hits v_z)
    }
  }
  // RREF with recorded pivot columns.
  std::vector<size_t> pivot_cols;
  size_t rank = 0;
  for (size_t col = 0; col < cols && rank < k_; col++) {
    size_t sel = SIZE_MAX;
    for (size_t r = rank; r < k_; r++) {
      if (col_bit(check, r, col)) {
        sel = r;
        break;
      }
    }
    if (sel == SIZE_MAX) continue;
    for (size_t w = 0; w < cw; w++) {
      std::swap(check[rank * cw + w], check[sel * cw + w]);
    }
    for (size_t r = 0; r < k_; r++) {
      if (r != rank && col_bit(check, r, col)) {
        for (size_t w = 0; w < cw; w++) {
          check[r * cw + w] ^= check[rank * cw + w];
        }
      }
    }
    pivot_cols.push_back(col);
    rank++;
  }

  // Kernel basis: one vector per free column.
  std::vector<uint8_t> is_pivot(cols, 0);
  for (size_t c : pivot_cols) is_pivot[c] = 1;
  std::vector<std::vector<uint64_t>> kernel;
  for (size_t free_col = 0; free_col < cols; free_col++) {
    if (is_pivot[free_col]) continue;
    std::vector<uint64_t> v(cw, 0);
    set_bit(v.data(), bitpos(free_col), true);
    for (size_t p = 0; p < rank; p++) {
      if (col_bit(check, p, free_col)) {
        set_bit(v.data(), bitpos(pivot_cols[p]), true);
      }
    }
    kernel.push_back(std::move(v));
  }

  // Reduce kernel vectors by the stabilizer rows (as symplectic vectors,
  // x block then z block) and keep two independent residues.
  std::vector<std::vector<uint64_t>> basis;  // stabilizer + chosen residues
  std::vector<size_t> basis_lead;
  auto reduce_add = [&](std::vector<uint64_t> v,
                        bool add) -> std::optional<std::vector<uint64_t>> {
    for (size_t b = 0; b < basis.size(); b++) {
      if (get_bit(v.data(), basis_lead[b])) {
        for (size_t w = 0; w < cw; w++) v[w] ^= basis[b][w];
      }
    }
    size_t col = first_set_column(v.data(), cw);
    if (col == SIZE_MAX) return std::nullopt;
    if (add) {
      // Keep basis rows reduced against each other so lookups by leading
      // bit stay valid regardless of insertion order.
      for (size_t b = 0; b < basis.size(); b++) {
        if (get_bit(basis[b].data(), col)) {
          for (size_t w = 0; w < cw; w++) basis[b][w] ^= v[w];
        }
      }
      basis.push_back(v);
      basis_lead.push_back(col);
    }
    return v;
  };
  for (size_t r = 0; r < k_; r++) {
    std::vector<uint64_t> v(cw, 0);
    for (size_t w = 0; w < w_; w++) {
      v[w] = xs_[r * w_ + w];
      v[w_ + w] = zs_[r * w_ + w];
    }
    reduce_add(std::move(v), true);
  }
  std::vector<std::vector<uint64_t>> logicals;
  for (auto& v : kernel) {
    auto residue = reduce_add(v, true);
    if (residue) {
      logicals.push_back(*residue);
      if (logicals.size() == 2) break;
    }
  }
  if (logicals.size() != 2) {
    throw std::logic_error("failed to find a logical pair");
  }
  auto to_pauli = [&](const std::vector<uint64_t>& v) {
    PauliOperator p(n_);
    std::copy(v.begin(), v.begin() + w_, p.x_data());
    std::copy(v.begin() + w_, v.begin() + cw, p.z_data());
    return p;
  };
  PauliOperator a = to_pauli(logicals[0]);
  PauliOperator b = to_pauli(logicals[1]);
  if (a.commutes_with(b)) {
    throw std::logic_error("logical pair fails to anticommute");
  }
  // Return (l_x, l_z); the labels are a convention, so hand back in order.
  return {a, b};
}

StabilizerState StabilizerState::rotated(size_t shift) const {
  StabilizerState out(n_);
  out.k_ = k_;
  for (size_t r = 0; r < k_; r++) {
    for (size_t i = 0; i < n_; i++) {
      size_t src = (i + shift) % n_;
      set_bit(out.xs_.data() + r * w_, i,
              get_bit(xs_.data() + r * w_, src));
      set_bit(out.zs_.data() + r * w_, i,
              get_bit(zs_.data() + r * w_, src));
    }
    out.signs_[r] = signs_[r];
  }
  return out;
}

StabilizerState StabilizerState::permuted(
    const std::vector<size_t>& new_site_of_old) const {
  if (new_site_of_old.size() != n_) {
    throw std::invalid_argument("permutation size mismatch");
  }
  StabilizerState out(n_);
  out.k_ = k_;
  for (size_t r = 0; r < k_; r++) {
    for (size_t i = 0; i < n_; i++) {
      size_t dst = new_site_of_old[i];
      set_bit(out.xs_.data() + r * w_, dst, get_bit(xs_.data() + r * w_, i));
      set_bit(out.zs_.data() + r * w_, dst, get_bit(zs_.data() + r * w_, i));
    }
    out.signs_[r] = signs_[r];
  }
  return out;
}

StabilizerState StabilizerState::extended_with_ancilla(
    const PauliOperator& l_x, const PauliOperator& l_z) const {
  if (k_ + 1 != n_) {
    throw std::invalid_argument("ancilla extension wants k = n-1");
  }
  if (l_x.num_sites() != n_ || l_z.num_sites() != n_) {
    throw std::invalid_argument("logical size mismatch");
  }
  StabilizerState out(n_ + 1);
  auto shifted = [&](const uint64_t* x, const uint64_t* z, uint8_t sg,
                     bool anc_x, bool anc_z) {
    PauliOperator p(n_ + 1);
    for (size_t i = 0; i < n_; i++) {
      p.set_x_bit(i + 1, get_bit(x, i));
      p.set_z_bit(i + 1, get_bit(z, i));
    }
    p.set_x_bit(0, anc_x);
    p.set_z_bit(0, anc_z);
    p.set_phase(sg ? 2 : 0);
    return p;
  };
  for (size_t r = 0; r < k_; r++) {
    out.append_row(shifted(xs_.data() + r * w_, zs_.data() + r * w_,
                           signs_[r], false, false));
  }
  out.append_row(shifted(l_x.x_data(), l_x.z_data(), l_x.phase() == 2,
                         true, false));
  out.append_row(shifted(l_z.x_data(), l_z.z_data(), l_z.phase() == 2,
                         false, true));
  if (!out.generators_commute()) {
    throw std::invalid_argument("logicals do not commute with the group");
  }
  if (!out.generators_independent()) {
    throw std::invalid_argument("logicals are not independent of the group");
  }
  return out;
}

bool StabilizerState::generators_commute() const {
  for (size_t r = 0; r < k_; r++) {
    for (size_t s = r + 1; s < k_; s++) {
      if (!pauli_words::commute(xs_.data() + r * w_, zs_.data() + r * w_,
                                xs_.data() + s * w_, zs_.data() + s * w_,
                                w_)) {
        return false;
      }
    }
  }
  return true;
}

bool StabilizerState::generators_independent() const {
  std::vector<uint64_t> rows(2 * k_ * w_);
  std::vector<size_t> lead;
  for (size_t r = 0; r < k_; r++) {
    uint64_t* row = rows.data() + 2 * lead.size() * w_;
    for (size_t w = 0; w < w_; w++) {
      row[w] = xs_[r * w_ + w];
      row[w_ + w] = zs_[r * w_ + w];
    }
    for (size_t p = 0; p < lead.size(); p++) {
      const uint64_t* prow = rows.data() + 2 * p * w_;
      if ((row[lead[p] >> 6] >> (lead[p] & 63)) & 1) {
        for (size_t w = 0; w < 2 * w_; w++) row[w] ^= prow[w];
      }
    }
    size_t col = first_set_column(row, 2 * w_);
    if (col == SIZE_MAX) return false;
    lead.push_back(col);
  }
  return true;
}

}  // namespace diffmon
