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

#ifndef DIFFMON_PAULI_HPP
#define DIFFMON_PAULI_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace diffmon {

inline constexpr size_t words_for(size_t num_bits) {
  return (num_bits + 63) / 64;
}

inline bool get_bit(const uint64_t* words, size_t i) {
  return (words[i >> 6] >> (i & 63)) & 1;
}

inline void set_bit(uint64_t* words, size_t i, bool v) {
  uint64_t mask = uint64_t{1} << (i & 63);
  if (v) {
    words[i >> 6] |= mask;
  } else {
    words[i >> 6] &= ~mask;
  }
}

// Word-level primitives shared by PauliOperator and the tableau rows.
// Site letters are encoded by bit pairs (x, z):
//   (0,0)=I  (1,0)=X  (0,1)=Z  (1,1)=Y
// and an operator with bit planes (x, z) and phase t means
//   i^t * prod_j i^{x_j z_j} X_j^{x_j} Z_j^{z_j},
// so Hermitian operators carry t = 0 (sign +1) or t = 2 (sign -1).
namespace pauli_words {

// Multiplies in place: (x1, z1, t1) := (x1, z1, t1) * (x2, z2, t2), with
// operand 1 as the left factor. Returns the phase exponent of the product,
// mod 4. Operand order matters only through the anticommutation sign, which
// this accounts for exactly.
uint8_t mul_accumulate(uint64_t* x1, uint64_t* z1, uint8_t t1,
                       const uint64_t* x2, const uint64_t* z2, uint8_t t2,
                       size_t num_words);

bool commute(const uint64_t* x1, const uint64_t* z1, const uint64_t* x2,
             const uint64_t* z2, size_t num_words);

}  // namespace pauli_words

// A dense n-site Pauli operator with phase tracked mod 4.
class PauliOperator {
 public:
  PauliOperator() = default;
  explicit PauliOperator(size_t num_sites);

  // Accepts e.g. "XIZY", "+XX", "-ZZ", "iY", "-iXZ".
  static PauliOperator from_string(const std::string& text);
  static PauliOperator single_site(size_t num_sites, size_t site, char letter,
                                   int sign = +1);

  size_t num_sites() const { return num_sites_; }
  size_t num_words() const { return xs_.size(); }
  uint8_t phase() const { return phase_; }
  void set_phase(uint8_t t) { phase_ = t & 3; }
  bool hermitian() const { return (phase_ & 1) == 0; }
  // +1 or -1; only meaningful for Hermitian operators.
  int sign() const;

  bool x_bit(size_t site) const { return get_bit(xs_.data(), site); }
  bool z_bit(size_t site) const { return get_bit(zs_.data(), site); }
  void set_x_bit(size_t site, bool v) { set_bit(xs_.data(), site, v); }
  void set_z_bit(size_t site, bool v) { set_bit(zs_.data(), site, v); }
  char letter(size_t site) const;
  bool identity_at(size_t site) const {
    return !x_bit(site) && !z_bit(site);
  }
  bool is_identity() const;
  size_t weight() const;

  bool commutes_with(const PauliOperator& other) const;

  // this := this * rhs.
  void mul_assign(const PauliOperator& rhs);
  PauliOperator operator*(const PauliOperator& rhs) const;
  bool operator==(const PauliOperator& other) const = default;

  // Phase prefix then letters, e.g. "-XIZ", "i" / "-i" for imaginary phases.
  std::string str() const;

  const uint64_t* x_data() const { return xs_.data(); }
  const uint64_t* z_data() const { return zs_.data(); }
  uint64_t* x_data() { return xs_.data(); }
  uint64_t* z_data() { return zs_.data(); }

 private:
  size_t num_sites_ = 0;
  uint8_t phase_ = 0;
  std::vector<uint64_t> xs_, zs_;
};

}  // namespace diffmon

#endif
