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

#include "diffmon/clifford.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <deque>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "doctest.h"

using diffmon::CliffordGate;
using diffmon::GateTable;
using diffmon::SmallPauli;

namespace {

// Closure of the two-qubit Clifford group from a standard generating set,
// keyed by the canonical tableau. Independent of the sampler construction.
std::unordered_set<uint32_t> enumerate_two_qubit_cliffords(
    std::unordered_map<uint32_t, CliffordGate>* gates_out = nullptr) {
  std::vector<CliffordGate> gens = {
      CliffordGate::embed_single(CliffordGate::hadamard(), 0),
      CliffordGate::embed_single(CliffordGate::hadamard(), 1),
      CliffordGate::embed_single(CliffordGate::phase_s(), 0),
      CliffordGate::embed_single(CliffordGate::phase_s(), 1),
      CliffordGate::cnot(),
      CliffordGate::embed_single(CliffordGate::pauli_x(), 0),
      CliffordGate::embed_single(CliffordGate::pauli_x(), 1),
  };
  std::unordered_set<uint32_t> seen;
  std::deque<CliffordGate> frontier;
  CliffordGate id = CliffordGate::identity(2);
  seen.insert(id.canonical_key());
  frontier.push_back(id);
  if (gates_out) (*gates_out)[id.canonical_key()] = id;
  while (!frontier.empty()) {
    CliffordGate g = frontier.front();
    frontier.pop_front();
    for (const CliffordGate& h : gens) {
      CliffordGate next = g.then(h);
      if (seen.insert(next.canonical_key()).second) {
        frontier.push_back(next);
        if (gates_out) (*gates_out)[next.canonical_key()] = next;
      }
    }
  }
  return seen;
}

}  // namespace

TEST_CASE("named gate tableaus") {
  CliffordGate h = CliffordGate::hadamard();
  CHECK(h.conjugate({0, 1, 0}) == SmallPauli{1, 0, 0});  // Z -> X
  CHECK(h.conjugate({1, 0, 0}) == SmallPauli{0, 1, 0});  // X -> Z
  CHECK(h.conjugate({1, 1, 0}) == SmallPauli{1, 1, 1});  // Y -> -Y

  CliffordGate s = CliffordGate::phase_s();
  CHECK(s.conjugate({1, 0, 0}) == SmallPauli{1, 1, 0});  // X -> Y
  CHECK(s.conjugate({1, 1, 0}) == SmallPauli{1, 0, 1});  // Y -> -X

  CliffordGate cx = CliffordGate::cnot();
  CHECK(cx.conjugate({1, 0, 0}) == SmallPauli{3, 0, 0});  // X0 -> X0 X1
  CHECK(cx.conjugate({0, 2, 0}) == SmallPauli{0, 3, 0});  // Z1 -> Z0 Z1
  CHECK(cx.conjugate({0, 1, 0}) == SmallPauli{0, 1, 0});  // Z0 fixed
  CHECK(cx.conjugate({2, 0, 0}) == SmallPauli{2, 0, 0});  // X1 fixed

  CliffordGate sw = CliffordGate::swap_gate();
  CHECK(sw.conjugate({1, 2, 0}) == SmallPauli{2, 1, 0});  // X0 Z1 -> Z0 X1

  CHECK(h.valid());
  CHECK(s.valid());
  CHECK(cx.valid());
  CHECK(CliffordGate::cz().valid());
  CHECK(sw.valid());
}

TEST_CASE("composition identities") {
  CliffordGate h = CliffordGate::hadamard();
  CHECK(h.then(h) == CliffordGate::identity(1));
  // S S = Z up to global phase.
  CliffordGate s = CliffordGate::phase_s();
  CHECK(s.then(s) == CliffordGate::pauli_z());
  // SWAP = CNOT01 CNOT10 CNOT01; build CNOT10 by conjugating with swap.
  CliffordGate cx = CliffordGate::cnot();
  CliffordGate h0 = CliffordGate::embed_single(h, 0);
  CliffordGate h1 = CliffordGate::embed_single(h, 1);
  CliffordGate hh = h0.then(h1);
  CliffordGate cx10 = hh.then(cx).then(hh);
  CHECK(cx.then(cx10).then(cx) == CliffordGate::swap_gate());
}

TEST_CASE("group closure has order 11520 and sampler stays inside") {
  std::unordered_set<uint32_t> group = enumerate_two_qubit_cliffords();
  CHECK(group.size() == 11520);

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 2000; trial++) {
    CliffordGate g = CliffordGate::random_two_qubit(rng);
    CHECK(g.valid());
    CHECK(group.count(g.canonical_key()) == 1);
  }
}

TEST_CASE("sampler is uniform over the enumerated group") {
  std::unordered_set<uint32_t> group = enumerate_two_qubit_cliffords();
  std::unordered_map<uint32_t, size_t> counts;
  counts.reserve(group.size() * 2);
  const size_t draws = 1000000;
  std::mt19937_64 rng(20260814);
  size_t support_both = 0;
  for (size_t i = 0; i < draws; i++) {
    CliffordGate g = CliffordGate::random_two_qubit(rng);
    counts[g.canonical_key()]++;
    const SmallPauli& ix = g.image(0);
    uint8_t letters0 = (ix.x | ix.z) & 1, letters1 = (ix.x | ix.z) & 2;
    if (letters0 && letters1) support_both++;
  }
  // Every observed key must be in the group.
  double expected = static_cast<double>(draws) / group.size();
  double statistic = 0;
  for (uint32_t key : group) {
    double observed = counts.count(key) ? counts[key] : 0.0;
    statistic += (observed - expected) * (observed - expected) / expected;
  }
  boost::math::chi_squared dist(static_cast<double>(group.size() - 1));
  double threshold = boost::math::quantile(dist, 0.99);
  CHECK(statistic < threshold);

  // Two-point function: image of X0 touching both sites. Enumerate the
  // exact fraction: X0's image is a uniform nonzero symplectic vector, 9 of
  // 15 touch both sites.
  double frac = static_cast<double>(support_both) / draws;
  double expect_frac = 9.0 / 15.0;
  double sigma = std::sqrt(expect_frac * (1 - expect_frac) / draws);
  CHECK(std::abs(frac - expect_frac) < 5 * sigma);
}

TEST_CASE("gate tables match direct conjugation") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 50; trial++) {
    CliffordGate g = CliffordGate::random_two_qubit(rng);
    GateTable t = GateTable::from_gate(g);
    for (int idx = 0; idx < 16; idx++) {
      SmallPauli in{static_cast<uint8_t>((idx & 1) | ((idx >> 1) & 2)),
                    static_cast<uint8_t>(((idx >> 1) & 1) | ((idx >> 2) & 2)),
                    0};
      SmallPauli out = g.conjugate(in);
      CHECK(t.out_x[idx] == out.x);
      CHECK(t.out_z[idx] == out.z);
      CHECK(t.sign[idx] == out.sign);
    }
  }
}

TEST_CASE("conjugation preserves products") {
  // image(P) image(Q) must equal image(PQ) with signs tracked, checked on
  // single-letter pairs through random gates.
  std::mt19937_64 rng(4242);
  auto to_op = [](const SmallPauli& p) {
    diffmon::PauliOperator out(2);
    out.set_x_bit(0, p.x & 1);
    out.set_x_bit(1, (p.x >> 1) & 1);
    out.set_z_bit(0, p.z & 1);
    out.set_z_bit(1, (p.z >> 1) & 1);
    out.set_phase(p.sign ? 2 : 0);
    return out;
  };
  for (int trial = 0; trial < 30; trial++) {
    CliffordGate g = CliffordGate::random_two_qubit(rng);
    for (int a = 0; a < 16; a++) {
      for (int b = 0; b < 16; b++) {
        SmallPauli pa{static_cast<uint8_t>((a & 1) | ((a >> 1) & 2)),
                      static_cast<uint8_t>(((a >> 1) & 1) | ((a >> 2) & 2)),
                      0};
        SmallPauli pb{static_cast<uint8_t>((b & 1) | ((b >> 1) & 2)),
                      static_cast<uint8_t>(((b >> 1) & 1) | ((b >> 2) & 2)),
                      0};
        diffmon::PauliOperator prod = to_op(pa) * to_op(pb);
        if (prod.hermitian()) {
          SmallPauli sp{
              static_cast<uint8_t>(prod.x_bit(0) | (prod.x_bit(1) << 1)),
              static_cast<uint8_t>(prod.z_bit(0) | (prod.z_bit(1) << 1)),
              static_cast<uint8_t>(prod.phase() == 2)};
          diffmon::PauliOperator lhs =
              to_op(g.conjugate(pa)) * to_op(g.conjugate(pb));
          diffmon::PauliOperator rhs = to_op(g.conjugate(sp));
          CHECK(lhs == rhs);
        }
      }
    }
  }
}
