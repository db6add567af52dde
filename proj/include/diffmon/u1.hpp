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

#ifndef DIFFMON_U1_HPP
#define DIFFMON_U1_HPP

#include <array>
#include <random>
#include <vector>

#include "diffmon/clifford.hpp"

namespace diffmon {

struct U1Verdict {
  bool ok = false;
  // When ok: the site receiving the image of Z_s, per gate site s.
  std::array<size_t, 2> z_image_site{};
  // When not ok: the offending image and which Z produced it.
  SmallPauli witness{};
  size_t witness_site = 0;
};

// A gate conserves the total-Z charge iff it maps every single-site Z to a
// single-site Z with positive sign; the verdict carries the induced site
// permutation or the violating image.
U1Verdict verify_u1_gate(const CliffordGate& gate);

// Two-site gates closed under composition, all charge-conserving: the group
// generated by S on either site, controlled-Z, and SWAP (Z on a site is S
// squared, so it is included).
class U1GateSet {
 public:
  static const U1GateSet& default_set();

  const std::vector<CliffordGate>& gates() const { return gates_; }
  const CliffordGate& sample(std::mt19937_64& rng) const;

 private:
  std::vector<CliffordGate> gates_;
};

}  // namespace diffmon

#endif
