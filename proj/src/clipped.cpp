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

#include "diffmon/clipped.hpp"

#include <bit>
#include <cassert>
#include <stdexcept>

namespace diffmon {

ClippedGauge ClippedGauge::from_state(const StabilizerState& state) {
  if (!state.pure()) {
    throw std::invalid_argument("clipped gauge is defined for pure states");
  }
  ClippedGauge g;
  g.n_ = state.num_sites();
  g.w_ = state.words_per_row();
  g.k_ = state.num_generators();
  g.xs_.resize(g.k_ * g.w_);
  g.zs_.resize(g.k_ * g.w_);
  g.signs_.resize(g.k_);
  for (size_t r = 0; r < g.k_; r++) {
    std::copy(state.row_x(r), state.row_x(r) + g.w_, g.xs_.begin() + r * g.w_);
    std::copy(state.row_z(r), state.row_z(r) + g.w_, g.zs_.begin() + r * g.w_);
    g.signs_[r] = state.row_sign(r);
  }
  g.left_reduce();
  g.right_reduce();
  return g;
}

unsigned ClippedGauge::letter_at(size_t row, size_t site) const {
  size_t w = site >> 6, b = site & 63;
  return ((xs_[row * w_ + w] >> b) & 1) |
         (((zs_[row * w_ + w] >> b) & 1) << 1);
}

void ClippedGauge::mul_row(size_t dst, size_t src) {
  uint8_t t = pauli_words::mul_accumulate(
      xs_.data() + dst * w_, zs_.data() + dst * w_, signs_[dst] ? 2 : 0,
      xs_.data() + src * w_, zs_.data() + src * w_, signs_[src] ? 2 : 0, w_);
  assert((t & 1) == 0);
  signs_[dst] = t == 2;
}

uint32_t ClippedGauge::scan_left_end(size_t row) const {
  for (size_t w = 0; w < w_; w++) {
    uint64_t bits = xs_[row * w_ + w] | zs_[row * w_ + w];
    if (bits) {
      return static_cast<uint32_t>(w * 64 + std::countr_zero(bits));
    }
  }
  assert(false);
  return 0;
}

uint32_t ClippedGauge::scan_right_end(size_t row) const {
  for (size_t w = w_; w-- > 0;) {
    uint64_t bits = xs_[row * w_ + w] | zs_[row * w_ + w];
    if (bits) {
      return static_cast<uint32_t>(w * 64 + 63 - std::countl_zero(bits));
    }
  }
  assert(false);
  return 0;
}

void ClippedGauge::left_reduce() {
  // Left-to-right site sweep: at each site keep at most two generators with
  // independent letters as pivots and clear that site from every other
  // still-unassigned generator.
  std::vector<uint8_t> assigned(k_, 0);
  std::vector<size_t> cand;
  for (size_t j = 0; j < n_; j++) {
    cand.clear();
    for (size_t r = 0; r < k_; r++) {
      if (!assigned[r] && letter_at(r, j) != 0) {
        cand.push_back(r);
      }
    }
    if (cand.empty()) continue;
    size_t p1 = cand[0];
    unsigned l1 = letter_at(p1, j);
    size_t p2 = SIZE_MAX;
    unsigned l2 = 0;
    for (size_t i = 1; i < cand.size(); i++) {
      if (letter_at(cand[i], j) != l1) {
        p2 = cand[i];
        l2 = letter_at(p2, j);
        break;
      }
    }
    for (size_t r : cand) {
      if (r == p1 || r == p2) continue;
      unsigned lr = letter_at(r, j);
      if (lr == l1) {
        mul_row(r, p1);
      } else if (lr == l2) {
        mul_row(r, p2);
      } else {
        assert(p2 != SIZE_MAX);
        mul_row(r, p1);
        mul_row(r, p2);
      }
      assert(letter_at(r, j) == 0);
    }
    assigned[p1] = 1;
    if (p2 != SIZE_MAX) assigned[p2] = 1;
  }
}

void ClippedGauge::right_reduce() {
  // Right-to-left sweep. At site j, among unfinished generators currently
  // ending at j, the one with the largest left endpoint (and, among those
  // with an independent letter at j, the next largest) become pivots; the
  // rest are multiplied down. Choosing maximal left endpoints keeps every
  // multiplication from growing its target leftward, so the left endpoints
  // fixed by left_reduce survive.
  left_.resize(k_);
  right_.resize(k_);
  std::vector<uint8_t> finished(k_, 0);
  std::vector<std::vector<uint32_t>> bucket(n_);
  for (size_t r = 0; r < k_; r++) {
    left_[r] = scan_left_end(r);
    right_[r] = scan_right_end(r);
    bucket[right_[r]].push_back(static_cast<uint32_t>(r));
  }
  std::vector<uint32_t> cand;
  for (size_t j = n_; j-- > 0;) {
    cand.clear();
    for (uint32_t r : bucket[j]) {
      if (!finished[r] && right_[r] == j) {
        cand.push_back(r);
      }
    }
    if (cand.empty()) continue;
    uint32_t p1 = cand[0];
    for (uint32_t r : cand) {
      if (left_[r] > left_[p1]) p1 = r;
    }
    unsigned l1 = letter_at(p1, j);
    uint32_t p2 = UINT32_MAX;
    for (uint32_t r : cand) {
      if (letter_at(r, j) != l1 && (p2 == UINT32_MAX || left_[r] > left_[p2])) {
        p2 = r;
      }
    }
    unsigned l2 = p2 == UINT32_MAX ? 0 : letter_at(p2, j);
    for (uint32_t r : cand) {
      if (r == p1 || r == p2) continue;
      unsigned lr = letter_at(r, j);
      if (lr == l1) {
        mul_row(r, p1);
      } else if (lr == l2) {
        mul_row(r, p2);
      } else {
        assert(p2 != UINT32_MAX);
        mul_row(r, p1);
        mul_row(r, p2);
      }
      assert(letter_at(r, j) == 0);
      assert(scan_left_end(r) == left_[r]);
      right_[r] = scan_right_end(r);
      bucket[right_[r]].push_back(r);
    }
    finished[p1] = 1;
    if (p2 != UINT32_MAX) finished[p2] = 1;
  }
}

size_t ClippedGauge::entropy_prefix(size_t cut) const {
  size_t straddle = 0;
  for (size_t r = 0; r < k_; r++) {
    straddle += left_[r] < cut && cut <= right_[r];
  }
  assert(straddle % 2 == 0);
  return straddle / 2;
}

std::vector<uint32_t> ClippedGauge::entropy_all_prefixes() const {
  // Difference array over cut positions: generator r straddles cuts in
  // [left+1, right].
  std::vector<int32_t> delta(n_ + 2, 0);
  for (size_t r = 0; r < k_; r++) {
    delta[left_[r] + 1] += 1;
    delta[right_[r] + 1] -= 1;
  }
  std::vector<uint32_t> out(n_ + 1, 0);
  int32_t running = 0;
  for (size_t cut = 0; cut <= n_; cut++) {
    running += delta[cut];
    assert(running >= 0 && running % 2 == 0);
    out[cut] = static_cast<uint32_t>(running / 2);
  }
  return out;
}

size_t ClippedGauge::entropy_interval(size_t begin, size_t end) const {
  if (begin > end || end > n_) {
    throw std::invalid_argument("bad interval");
  }
  size_t count = 0;
  for (size_t r = 0; r < k_; r++) {
    bool l_in = left_[r] >= begin && left_[r] < end;
    bool r_in = right_[r] >= begin && right_[r] < end;
    count += l_in != r_in;
  }
  assert(count % 2 == 0);
  return count / 2;
}

bool ClippedGauge::two_ends_per_site() const {
  std::vector<uint32_t> ends(n_, 0);
  for (size_t r = 0; r < k_; r++) {
    ends[left_[r]]++;
    ends[right_[r]]++;
  }
  for (size_t j = 0; j < n_; j++) {
    if (ends[j] != 2) return false;
  }
  return true;
}

std::vector<PauliOperator> ClippedGauge::generators() const {
  std::vector<PauliOperator> out;
  out.reserve(k_);
  for (size_t r = 0; r < k_; r++) {
    PauliOperator p(n_);
    std::copy(xs_.begin() + r * w_, xs_.begin() + (r + 1) * w_, p.x_data());
    std::copy(zs_.begin() + r * w_, zs_.begin() + (r + 1) * w_, p.z_data());
    p.set_phase(signs_[r] ? 2 : 0);
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace diffmon
