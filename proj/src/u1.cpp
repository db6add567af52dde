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

#include "diffmon/u1.hpp"

#include <map>
#include <stdexcept>

namespace diffmon {

U1Verdict verify_u1_gate(const CliffordGate& gate) {
  U1Verdict v;
  v.ok = true;
  for (int s = 0; s < gate.arity(); s++) {
    SmallPauli in{0, static_cast<uint8_t>(1u << s), 0};
    SmallPauli img = gate.conjugate(in);
    bool single_z = img.x == 0 && img.sign == 0 &&
                    (img.z == 1 || img.z == 2) &&
                    (gate.arity() == 2 || img.z == 1);
    if (!single_z) {
      v.ok = false;
      v.witness = img;
      v.witness_site = static_cast<size_t>(s);
      return v;
    }
    v.z_image_site[s] = img.z == 1 ? 0 : 1;
  }
  return v;
}

const U1GateSet& U1GateSet::default_set() {
  static const U1GateSet set = [] {
    U1GateSet out;
    std::vector<CliffordGate> seeds = {
        CliffordGate::embed_single(CliffordGate::phase_s(), 0),
        CliffordGate::embed_single(CliffordGate::phase_s(), 1),
        CliffordGate::cz(),
        CliffordGate::swap_gate(),
    };
    // Breadth-first closure under composition; the result is the group
    // generated by the seeds (64 tableaus: S^a S^b CZ^c times optional SWAP).
    std::map<uint32_t, CliffordGate> seen;
    std::vector<CliffordGate> frontier = {CliffordGate::identity(2)};
    seen[CliffordGate::identity(2).canonical_key()] =
        CliffordGate::identity(2);
    while (!frontier.empty()) {
      std::vector<CliffordGate> next;
      for (const CliffordGate& g : frontier) {
        for (const CliffordGate& s : seeds) {
          CliffordGate h = g.then(s);
          if (seen.emplace(h.canonical_key(), h).second) {
            next.push_back(h);
          }
        }
      }
      frontier = std::move(next);
    }
    for (const auto& [key, gate] : seen) {
      (void)key;
      if (!verify_u1_gate(gate).ok) {
        throw std::logic_error("charge-violating gate in the closure");
      }
      out.gates_.push_back(gate);
    }
    return out;
  }();
  return set;
}

const CliffordGate& U1GateSet::sample(std::mt19937_64& rng) const {
  std::uniform_int_distribution<size_t> pick(0, gates_.size() - 1);
  return gates_[pick(rng)];
}

}  // namespace diffmon
