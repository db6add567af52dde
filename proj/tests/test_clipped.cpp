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

#include <random>

#include "doctest.h"

using diffmon::ClippedGauge;
using diffmon::CliffordGate;
using diffmon::GateTable;
using diffmon::PauliOperator;
using diffmon::StabilizerState;

namespace {

StabilizerState random_pure_state(size_t n, std::mt19937_64& rng,
                                  int depth = 0) {
  StabilizerState state = StabilizerState::random_product(n, rng);
  int layers = depth > 0 ? depth : static_cast<int>(n);
  for (int layer = 0; layer < layers; layer++) {
    size_t start = layer % 2;
    for (size_t i = start; i + 1 < n; i += 2) {
      GateTable t = GateTable::from_gate(CliffordGate::random_two_qubit(rng));
      state.apply_gate(t, i, i + 1);
    }
    if (layer % 3 == 2) {
      state.measure_z(rng() % n, rng);
    }
  }
  return state;
}

}  // namespace

TEST_CASE("clipped gauge simple forms") {
  ClippedGauge prod =
      ClippedGauge::from_state(StabilizerState::product_z(5));
  for (size_t r = 0; r < 5; r++) {
    CHECK(prod.left_end(r) == prod.right_end(r));
  }
  CHECK(prod.two_ends_per_site());
  for (size_t cut = 0; cut <= 5; cut++) {
    CHECK(prod.entropy_prefix(cut) == 0);
  }

  StabilizerState bell = StabilizerState::from_generators(
      2, {PauliOperator::from_string("XX"), PauliOperator::from_string("ZZ")});
  ClippedGauge cb = ClippedGauge::from_state(bell);
  CHECK(cb.left_end(0) == 0);
  CHECK(cb.right_end(0) == 1);
  CHECK(cb.left_end(1) == 0);
  CHECK(cb.right_end(1) == 1);
  CHECK(cb.entropy_prefix(1) == 1);
  CHECK(cb.two_ends_per_site());

  CHECK_THROWS(ClippedGauge::from_state(StabilizerState(4)));
}

TEST_CASE("clipping preserves the group with signs") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 25; trial++) {
    const size_t n = 24;
    StabilizerState state = random_pure_state(n, rng);
    ClippedGauge clip = ClippedGauge::from_state(state);
    CHECK(clip.two_ends_per_site());
    StabilizerState back =
        StabilizerState::from_generators(n, clip.generators());
    for (size_t r = 0; r < n; r++) {
      CHECK(state.membership_sign(back.generator(r)) == +1);
      CHECK(back.membership_sign(state.generator(r)) == +1);
    }
  }
}

TEST_CASE("clipped entropies equal rank entropies on all intervals") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 12; trial++) {
    const size_t n = 20;
    StabilizerState state = random_pure_state(n, rng);
    ClippedGauge clip = ClippedGauge::from_state(state);
    std::vector<uint32_t> prefixes = clip.entropy_all_prefixes();
    CHECK(prefixes.front() == 0);
    CHECK(prefixes.back() == 0);
    for (size_t a = 0; a <= n; a++) {
      CHECK(prefixes[a] == state.entropy_interval(0, a));
      CHECK(clip.entropy_prefix(a) == prefixes[a]);
      for (size_t b = a; b <= n; b++) {
        CHECK(clip.entropy_interval(a, b) == state.entropy_interval(a, b));
      }
    }
  }
}
