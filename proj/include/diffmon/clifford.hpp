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

#ifndef DIFFMON_CLIFFORD_HPP
#define DIFFMON_CLIFFORD_HPP

#include <array>
#include <cstdint>
#include <random>

#include "diffmon/pauli.hpp"

namespace diffmon {

// A pauli on 1 or 2 sites, compressed: bit s of x/z is the letter at site s,
// sign is the phase exponent halved (0 for +, 1 for -).
struct SmallPauli {
  uint8_t x = 0;
  uint8_t z = 0;
  uint8_t sign = 0;

  bool operator==(const SmallPauli&) const = default;
};

// A 1- or 2-site Clifford unitary, stored as the images of the single-site
// pauli generators under conjugation. Generator index is 2*site + (0 for X,
// 1 for Z).
class CliffordGate {
 public:
  CliffordGate() = default;
  static CliffordGate from_images(int arity,
                                  const std::array<SmallPauli, 4>& images);

  static CliffordGate identity(int arity);
  static CliffordGate hadamard();
  static CliffordGate phase_s();
  static CliffordGate pauli_x();
  static CliffordGate pauli_z();
  static CliffordGate cnot();
  static CliffordGate cz();
  static CliffordGate swap_gate();
  // Lifts a 1-site gate to a 2-site gate acting on the given site.
  static CliffordGate embed_single(const CliffordGate& g, int site);

  // Uniform over the 11520 two-qubit Cliffords (global phase dropped).
  static CliffordGate random_two_qubit(std::mt19937_64& rng);

  int arity() const { return arity_; }
  const SmallPauli& image(size_t generator_index) const {
    return images_[generator_index];
  }

  // Conjugates an arbitrary pauli on the gate's sites: U P U^dagger.
  // Input and output signs are phase/2; inputs must be Hermitian.
  SmallPauli conjugate(const SmallPauli& p) const;

  // Symplectic condition plus Hermitian, non-identity images.
  bool valid() const;

  // this followed by next, as a circuit (next ∘ this as operators).
  CliffordGate then(const CliffordGate& next) const;

  // 20-bit key: 4 bits per image plus 4 sign bits; unique per gate.
  uint32_t canonical_key() const;

  bool operator==(const CliffordGate&) const = default;

 private:
  int arity_ = 0;
  std::array<SmallPauli, 4> images_{};
};

// Dense conjugation table for fast tableau updates: entry index packs the
// input letter bits as x0 | z0<<1 | x1<<2 | z1<<3 (arity 1 uses 4 entries).
struct GateTable {
  std::array<uint8_t, 16> out_x{};
  std::array<uint8_t, 16> out_z{};
  std::array<uint8_t, 16> sign{};
  int arity = 0;

  static GateTable from_gate(const CliffordGate& gate);
};

}  // namespace diffmon

#endif
