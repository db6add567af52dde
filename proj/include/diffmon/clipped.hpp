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

#ifndef DIFFMON_CLIPPED_HPP
#define DIFFMON_CLIPPED_HPP

#include <cstdint>
#include <vector>

#include "diffmon/stabilizer.hpp"

namespace diffmon {

// Clipped-gauge form of a pure stabilizer state on an open chain: the
// generator list is row-reduced left to right and then right to left so
// that every site hosts exactly two generator endpoints. Interval entropies
// then reduce to endpoint counting.
//
// The chain is always treated as open; for periodic states the caller picks
// a rotation first.
class ClippedGauge {
 public:
  static ClippedGauge from_state(const StabilizerState& state);

  size_t num_sites() const { return n_; }
  size_t num_generators() const { return k_; }
  uint32_t left_end(size_t row) const { return left_[row]; }
  uint32_t right_end(size_t row) const { return right_[row]; }

  // S([0, cut)) for one cut, and for all cuts 0..n at once.
  size_t entropy_prefix(size_t cut) const;
  std::vector<uint32_t> entropy_all_prefixes() const;
  // S(A) for contiguous A = [begin, end): generators with exactly one
  // endpoint inside, halved.
  size_t entropy_interval(size_t begin, size_t end) const;

  bool two_ends_per_site() const;
  std::vector<PauliOperator> generators() const;

  // Letter code at one site: bit 0 = x, bit 1 = z (0=I, 1=X, 2=Z, 3=Y).
  unsigned letter_at(size_t row, size_t site) const;

 private:
  size_t n_ = 0, w_ = 0, k_ = 0;
  std::vector<uint64_t> xs_, zs_;
  std::vector<uint8_t> signs_;
  std::vector<uint32_t> left_, right_;
  void mul_row(size_t dst, size_t src);
  void left_reduce();
  void right_reduce();
  uint32_t scan_left_end(size_t row) const;
  uint32_t scan_right_end(size_t row) const;
};

}  // namespace diffmon

#endif
