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

#include <bit>
#include <stdexcept>

namespace diffmon {

namespace {

// Symplectic vectors over GF(2)^(2*arity), packed as x0|z0<<1|x1<<2|z1<<3.
inline uint8_t pack_sympl(uint8_t x, uint8_t z) {
  return static_cast<uint8_t>((x & 1) | ((z & 1) << 1) | ((x & 2) << 1) |
                              ((z & 2) << 2));
}

inline uint8_t sympl_x(uint8_t v) { return (v & 1) | ((v >> 1) & 2); }
inline uint8_t sympl_z(uint8_t v) { return ((v >> 1) & 1) | ((v >> 2) & 2); }

inline int sympl_product(uint8_t v, uint8_t w) {
  uint8_t cross =
      (sympl_x(v) & sympl_z(w)) ^ (sympl_z(v) & sympl_x(w));
  return std::popcount(static_cast<unsigned>(cross)) & 1;
}

PauliOperator to_pauli(const SmallPauli& p, int arity) {
  PauliOperator out(arity);
  for (int s = 0; s < arity; s++) {
    out.set_x_bit(s, (p.x >> s) & 1);
    out.set_z_bit(s, (p.z >> s) & 1);
  }
  out.set_phase(p.sign ? 2 : 0);
  return out;
}

SmallPauli from_pauli(const PauliOperator& p) {
  SmallPauli out;
  for (size_t s = 0; s < p.num_sites(); s++) {
    out.x |= p.x_bit(s) << s;
    out.z |= p.z_bit(s) << s;
  }
  if (!p.hermitian()) {
    throw std::logic_error("non-Hermitian conjugation result");
  }
  out.sign = p.phase() == 2;
  return out;
}

}  // namespace

CliffordGate CliffordGate::from_images(
    int arity, const std::array<SmallPauli, 4>& images) {
  CliffordGate g;
  g.arity_ = arity;
  g.images_ = images;
  if (!g.valid()) {
    throw std::invalid_argument("images do not define a Clifford gate");
  }
  return g;
}

CliffordGate CliffordGate::identity(int arity) {
  CliffordGate g;
  g.arity_ = arity;
  g.images_[0] = {1, 0, 0};
  g.images_[1] = {0, 1, 0};
  if (arity == 2) {
    g.images_[2] = {2, 0, 0};
    g.images_[3] = {0, 2, 0};
  }
  return g;
}

CliffordGate CliffordGate::hadamard() {
  CliffordGate g;
  g.arity_ = 1;
  g.images_[0] = {0, 1, 0};  // X -> Z
  g.images_[1] = {1, 0, 0};  // Z -> X
  return g;
}

CliffordGate CliffordGate::phase_s() {
  CliffordGate g;
  g.arity_ = 1;
  g.images_[0] = {1, 1, 0};  // X -> Y
  g.images_[1] = {0, 1, 0};  // Z -> Z
  return g;
}

CliffordGate CliffordGate::pauli_x() {
  CliffordGate g;
  g.arity_ = 1;
  g.images_[0] = {1, 0, 0};  // X -> X
  g.images_[1] = {0, 1, 1};  // Z -> -Z
  return g;
}

CliffordGate CliffordGate::pauli_z() {
  CliffordGate g;
  g.arity_ = 1;
  g.images_[0] = {1, 0, 1};  // X -> -X
  g.images_[1] = {0, 1, 0};  // Z -> Z
  return g;
}

CliffordGate CliffordGate::cnot() {
  CliffordGate g;
  g.arity_ = 2;
  g.images_[0] = {3, 0, 0};  // X0 -> X0 X1
  g.images_[1] = {0, 1, 0};  // Z0 -> Z0
  g.images_[2] = {2, 0, 0};  // X1 -> X1
  g.images_[3] = {0, 3, 0};  // Z1 -> Z0 Z1
  return g;
}

CliffordGate CliffordGate::cz() {
  CliffordGate g;
  g.arity_ = 2;
  g.images_[0] = {1, 2, 0};  // X0 -> X0 Z1
  g.images_[1] = {0, 1, 0};  // Z0 -> Z0
  g.images_[2] = {2, 1, 0};  // X1 -> Z0 X1
  g.images_[3] = {0, 2, 0};  // Z1 -> Z1
  return g;
}

CliffordGate CliffordGate::swap_gate() {
  CliffordGate g;
  g.arity_ = 2;
  g.images_[0] = {2, 0, 0};
  g.images_[1] = {0, 2, 0};
  g.images_[2] = {1, 0, 0};
  g.images_[3] = {0, 1, 0};
  return g;
}

CliffordGate CliffordGate::embed_single(const CliffordGate& g, int site) {
  if (g.arity_ != 1 || site < 0 || site > 1) {
    throw std::invalid_argument("embed_single wants a 1-site gate");
  }
  CliffordGate out = identity(2);
  for (int j = 0; j < 2; j++) {
    const SmallPauli& img = g.images_[j];
    out.images_[2 * site + j] = {
        static_cast<uint8_t>((img.x & 1) << site),
        static_cast<uint8_t>((img.z & 1) << site), img.sign};
  }
  return out;
}

SmallPauli CliffordGate::conjugate(const SmallPauli& p) const {
  // P = i^{sum_s x_s z_s} X0^{x0} Z0^{z0} X1^{x1} Z1^{z1} (times the sign),
  // and conjugation is multiplicative, so the image is the same word in the
  // generator images with the same prefactor.
  PauliOperator acc(arity_);
  int y_count = std::popcount(static_cast<unsigned>(p.x & p.z));
  acc.set_phase(((p.sign ? 2 : 0) + y_count) & 3);
  for (int s = 0; s < arity_; s++) {
    if ((p.x >> s) & 1) acc.mul_assign(to_pauli(images_[2 * s], arity_));
    if ((p.z >> s) & 1) acc.mul_assign(to_pauli(images_[2 * s + 1], arity_));
  }
  // The per-site i^{x z} letter factors are baked into both the input and
  // the output encodings, so no correction is needed on the way out.
  return from_pauli(acc);
}

bool CliffordGate::valid() const {
  int gens = 2 * arity_;
  for (int j = 0; j < gens; j++) {
    uint8_t v = pack_sympl(images_[j].x, images_[j].z);
    if (v == 0) return false;
    if (images_[j].sign > 1) return false;
  }
  for (int j = 0; j < gens; j++) {
    for (int l = j + 1; l < gens; l++) {
      uint8_t v = pack_sympl(images_[j].x, images_[j].z);
      uint8_t w = pack_sympl(images_[l].x, images_[l].z);
      // X_s and Z_s anticommute; everything else commutes.
      int want = (j / 2 == l / 2) ? 1 : 0;
      if (sympl_product(v, w) != want) return false;
    }
  }
  return true;
}

CliffordGate CliffordGate::then(const CliffordGate& next) const {
  if (arity_ != next.arity_) {
    throw std::invalid_argument("arity mismatch in composition");
  }
  CliffordGate out;
  out.arity_ = arity_;
  for (int j = 0; j < 2 * arity_; j++) {
    out.images_[j] = next.conjugate(images_[j]);
  }
  return out;
}

uint32_t CliffordGate::canonical_key() const {
  uint32_t key = 0;
  for (int j = 0; j < 2 * arity_; j++) {
    uint32_t v = pack_sympl(images_[j].x, images_[j].z);
    key |= v << (4 * j);
    key |= static_cast<uint32_t>(images_[j].sign) << (16 + j);
  }
  return key;
}

CliffordGate CliffordGate::random_two_qubit(std::mt19937_64& rng) {
  // Chooses the images of X0, Z0, X1, Z1 as uniformly random symplectic
  // vectors via rejection, then 4 sign bits: 15 * 8 * 3 * 2 * 16 = 11520
  // outcomes, exactly the two-qubit Clifford count mod phase.
  auto draw4 = [&rng]() { return static_cast<uint8_t>(rng() & 15); };
  uint8_t vx0, vz0, vx1, vz1;
  do {
    vx0 = draw4();
  } while (vx0 == 0);
  do {
    vz0 = draw4();
  } while (sympl_product(vx0, vz0) != 1);
  do {
    vx1 = draw4();
  } while (vx1 == 0 || sympl_product(vx1, vx0) != 0 ||
           sympl_product(vx1, vz0) != 0);
  do {
    vz1 = draw4();
  } while (sympl_product(vz1, vx0) != 0 || sympl_product(vz1, vz0) != 0 ||
           sympl_product(vz1, vx1) != 1);
  uint64_t signs = rng();
  CliffordGate g;
  g.arity_ = 2;
  uint8_t vs[4] = {vx0, vz0, vx1, vz1};
  for (int j = 0; j < 4; j++) {
    g.images_[j] = {sympl_x(vs[j]), sympl_z(vs[j]),
                    static_cast<uint8_t>((signs >> j) & 1)};
  }
  return g;
}

GateTable GateTable::from_gate(const CliffordGate& gate) {
  GateTable table;
  table.arity = gate.arity();
  int entries = gate.arity() == 2 ? 16 : 4;
  for (int idx = 0; idx < entries; idx++) {
    SmallPauli in{static_cast<uint8_t>((idx & 1) | ((idx >> 1) & 2)),
                  static_cast<uint8_t>(((idx >> 1) & 1) | ((idx >> 2) & 2)),
                  0};
    SmallPauli out = gate.conjugate(in);
    table.out_x[idx] = out.x;
    table.out_z[idx] = out.z;
    table.sign[idx] = out.sign;
  }
  return table;
}

}  // namespace diffmon
