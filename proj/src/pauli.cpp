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

#include "diffmon/pauli.hpp"

#include <bit>
#include <stdexcept>

namespace diffmon {

namespace pauli_words {

uint8_t mul_accumulate(uint64_t* x1, uint64_t* z1, uint8_t t1,
                       const uint64_t* x2, const uint64_t* z2, uint8_t t2,
                       size_t num_words) {
  // Per site, the product of two letters picks up i^{+1} on sites where the
  // left operand's (x,z) meets the right one "in order" and i^{-1} where it
  // meets it reversed; commuting letter pairs contribute nothing. The two
  // masks below select exactly the +i sites and the anticommuting sites.
  uint64_t plus = 0, minus = 0;
  for (size_t w = 0; w < num_words; w++) {
    uint64_t a = x1[w], b = z1[w], c = x2[w], d = z2[w];
    uint64_t f = (a & d & (b ^ c)) | (~a & b & c & ~d);
    uint64_t anti = (a & d) ^ (b & c);
    plus += std::popcount(f);
    minus += std::popcount(anti & ~f);
    x1[w] = a ^ c;
    z1[w] = b ^ d;
  }
  return static_cast<uint8_t>((t1 + t2 + plus + 4 * num_words * 64 - minus) &
                              3);
}

bool commute(const uint64_t* x1, const uint64_t* z1, const uint64_t* x2,
             const uint64_t* z2, size_t num_words) {
  uint64_t parity = 0;
  for (size_t w = 0; w < num_words; w++) {
    parity ^= (x1[w] & z2[w]) ^ (z1[w] & x2[w]);
  }
  return std::popcount(parity) % 2 == 0;
}

}  // namespace pauli_words

PauliOperator::PauliOperator(size_t num_sites)
    : num_sites_(num_sites),
      phase_(0),
      xs_(words_for(num_sites), 0),
      zs_(words_for(num_sites), 0) {}

PauliOperator PauliOperator::from_string(const std::string& text) {
  size_t k = 0;
  uint8_t phase = 0;
  if (k < text.size() && (text[k] == '+' || text[k] == '-')) {
    if (text[k] == '-') {
      phase = 2;
    }
    k++;
  }
  if (k < text.size() && text[k] == 'i') {
    phase = (phase + 1) & 3;
    k++;
  }
  PauliOperator result(text.size() - k);
  result.phase_ = phase;
  for (size_t site = 0; k < text.size(); k++, site++) {
    switch (text[k]) {
      case 'I':
      case '_':
        break;
      case 'X':
        result.set_x_bit(site, true);
        break;
      case 'Y':
        result.set_x_bit(site, true);
        result.set_z_bit(site, true);
        break;
      case 'Z':
        result.set_z_bit(site, true);
        break;
      default:
        throw std::invalid_argument("bad pauli letter in " + text);
    }
  }
  return result;
}

PauliOperator PauliOperator::single_site(size_t num_sites, size_t site,
                                         char letter, int sign) {
  if (site >= num_sites) {
    throw std::invalid_argument("site out of range");
  }
  PauliOperator result(num_sites);
  switch (letter) {
    case 'X':
      result.set_x_bit(site, true);
      break;
    case 'Y':
      result.set_x_bit(site, true);
      result.set_z_bit(site, true);
      break;
    case 'Z':
      result.set_z_bit(site, true);
      break;
    default:
      throw std::invalid_argument("bad pauli letter");
  }
  result.phase_ = sign < 0 ? 2 : 0;
  return result;
}

int PauliOperator::sign() const {
  if (!hermitian()) {
    throw std::logic_error("sign of a non-Hermitian pauli");
  }
  return phase_ == 0 ? +1 : -1;
}

char PauliOperator::letter(size_t site) const {
  bool x = x_bit(site), z = z_bit(site);
  if (x && z) return 'Y';
  if (x) return 'X';
  if (z) return 'Z';
  return 'I';
}

bool PauliOperator::is_identity() const {
  for (size_t w = 0; w < xs_.size(); w++) {
    if (xs_[w] | zs_[w]) return false;
  }
  return true;
}

size_t PauliOperator::weight() const {
  size_t total = 0;
  for (size_t w = 0; w < xs_.size(); w++) {
    total += std::popcount(xs_[w] | zs_[w]);
  }
  return total;
}

bool PauliOperator::commutes_with(const PauliOperator& other) const {
  if (num_sites_ != other.num_sites_) {
    throw std::invalid_argument("size mismatch");
  }
  return pauli_words::commute(xs_.data(), zs_.data(), other.xs_.data(),
                              other.zs_.data(), xs_.size());
}

void PauliOperator::mul_assign(const PauliOperator& rhs) {
  if (num_sites_ != rhs.num_sites_) {
    throw std::invalid_argument("size mismatch");
  }
  phase_ = pauli_words::mul_accumulate(xs_.data(), zs_.data(), phase_,
                                       rhs.xs_.data(), rhs.zs_.data(),
                                       rhs.phase_, xs_.size());
}

PauliOperator PauliOperator::operator*(const PauliOperator& rhs) const {
  PauliOperator result = *this;
  result.mul_assign(rhs);
  return result;
}

std::string PauliOperator::str() const {
  static const char* prefixes[4] = {"+", "i", "-", "-i"};
  std::string out = prefixes[phase_];
  for (size_t site = 0; site < num_sites_; site++) {
    out += letter(site);
  }
  return out;
}

}  // namespace diffmon
