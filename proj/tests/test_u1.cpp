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
#include <random>
#include <set>

#include <boost/math/distributions/chi_squared.hpp>

#include "diffmon/dense_oracle.hpp"
#include "doctest.h"

using namespace diffmon;

namespace {

std::set<uint32_t> member_keys() {
  std::set<uint32_t> keys;
  for (const auto& g : U1GateSet::default_set().gates()) {
    keys.insert(g.canonical_key());
  }
  return keys;
}

}  // namespace

TEST_CASE("charge-conserving set has 64 distinct verified members") {
  const auto& gates = U1GateSet::default_set().gates();
  CHECK(gates.size() == 64);
  CHECK(member_keys().size() == 64);
  for (const auto& g : gates) {
    CAPTURE(g.canonical_key());
    CHECK(verify_u1_gate(g).ok);
  }
}

TEST_CASE("set is closed under composition") {
  const auto& gates = U1GateSet::default_set().gates();
  auto keys = member_keys();
  for (const auto& a : gates) {
    for (const auto& b : gates) {
      CHECK(keys.count(a.then(b).canonical_key()) == 1);
    }
  }
}

TEST_CASE("expected generators are members") {
  auto keys = member_keys();
  CHECK(keys.count(CliffordGate::identity(2).canonical_key()));
  CHECK(keys.count(CliffordGate::cz().canonical_key()));
  CHECK(keys.count(CliffordGate::swap_gate().canonical_key()));
  for (int site = 0; site < 2; site++) {
    CHECK(keys.count(
        CliffordGate::embed_single(CliffordGate::phase_s(), site)
            .canonical_key()));
    CHECK(keys.count(
        CliffordGate::embed_single(CliffordGate::pauli_z(), site)
            .canonical_key()));
  }
  // Anything moving charge is not.
  CHECK_FALSE(keys.count(
      CliffordGate::embed_single(CliffordGate::hadamard(), 0)
          .canonical_key()));
  CHECK_FALSE(keys.count(CliffordGate::cnot().canonical_key()));
}

TEST_CASE("verdict carries the violating image") {
  auto v = verify_u1_gate(CliffordGate::embed_single(CliffordGate::hadamard(), 0));
  CHECK_FALSE(v.ok);
  CHECK(v.witness_site == 0);
  // H maps Z to X.
  CHECK(v.witness.x == 1);
  CHECK(v.witness.z == 0);
  CHECK(v.witness.sign == 0);
}

TEST_CASE("verdict carries the induced site permutation") {
  auto cz = verify_u1_gate(CliffordGate::cz());
  REQUIRE(cz.ok);
  CHECK(cz.z_image_site[0] == 0);
  CHECK(cz.z_image_site[1] == 1);
  auto sw = verify_u1_gate(CliffordGate::swap_gate());
  REQUIRE(sw.ok);
  CHECK(sw.z_image_site[0] == 1);
  CHECK(sw.z_image_site[1] == 0);
}

TEST_CASE("every member commutes with the dense charge operator") {
  Eigen::MatrixXcd charge = Eigen::MatrixXcd::Zero(4, 4);
  // Site 0 is the low bit of the basis index.
  for (int b = 0; b < 4; b++) {
    charge(b, b) = (b & 1) + ((b >> 1) & 1);
  }
  for (const auto& g : U1GateSet::default_set().gates()) {
    Eigen::MatrixXcd u = gate_matrix(g);
    CHECK((u * charge - charge * u).cwiseAbs().maxCoeff() < 1e-12);
  }
  // Sanity: the oracle does reject a charge violator.
  Eigen::MatrixXcd h = gate_matrix(
      CliffordGate::embed_single(CliffordGate::hadamard(), 0));
  CHECK((h * charge - charge * h).cwiseAbs().maxCoeff() > 0.5);
}

TEST_CASE("sampling is uniform over the set") {
  const auto& gates = U1GateSet::default_set().gates();
  std::map<uint32_t, size_t> index_of;
  for (size_t i = 0; i < gates.size(); i++) {
    index_of[gates[i].canonical_key()] = i;
  }
  std::mt19937_64 rng(20260814);
  std::vector<size_t> counts(gates.size(), 0);
  const size_t draws = 64000;
  for (size_t i = 0; i < draws; i++) {
    counts[index_of.at(U1GateSet::default_set().sample(rng).canonical_key())]++;
  }
  double expected = static_cast<double>(draws) / gates.size();
  double chi2 = 0;
  for (size_t c : counts) {
    double d = c - expected;
    chi2 += d * d / expected;
  }
  boost::math::chi_squared dist(static_cast<double>(gates.size() - 1));
  CHECK(chi2 < boost::math::quantile(dist, 0.999));
}
