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

#include "diffmon/dense_oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace diffmon {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

Eigen::Matrix2cd letter_matrix(char letter) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  switch (letter) {
    case 'I':
      m << 1, 0, 0, 1;
      break;
    case 'X':
      m << 0, 1, 1, 0;
      break;
    case 'Y':
      m << 0, -kI, kI, 0;
      break;
    case 'Z':
      m << 1, 0, 0, -1;
      break;
  }
  return m;
}

std::complex<double> phase_factor(uint8_t t) {
  static const std::complex<double> table[4] = {{1, 0}, {0, 1}, {-1, 0},
                                                {0, -1}};
  return table[t & 3];
}

void check_size(size_t n, size_t limit) {
  if (n > limit) {
    throw std::invalid_argument("dense oracle dimension overflow");
  }
}

}  // namespace

Eigen::MatrixXcd pauli_matrix(const PauliOperator& p) {
  check_size(p.num_sites(), 12);
  size_t dim = size_t{1} << p.num_sites();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
  // Site 0 is the least significant bit, so it is the rightmost kron factor;
  // building upward keeps each new site on the high side of the product.
  for (size_t s = 0; s < p.num_sites(); s++) {
    Eigen::MatrixXcd next(out.rows() * 2, out.cols() * 2);
    Eigen::Matrix2cd m = letter_matrix(p.letter(s));
    next.setZero();
    for (int i = 0; i < 2; i++) {
      for (int j = 0; j < 2; j++) {
        next.block(i * out.rows(), j * out.cols(), out.rows(), out.cols()) =
            m(i, j) * out;
      }
    }
    out = std::move(next);
  }
  (void)dim;
  return phase_factor(p.phase()) * out;
}

Eigen::MatrixXcd gate_matrix(const CliffordGate& gate) {
  // Choi reconstruction: the state (U (x) I)|Omega> on 2a qubits is the
  // joint +1 eigenvector of img(P) (x) P^T over the tableau generators P;
  // project a basis state onto that eigenspace and reshape.
  int a = gate.arity();
  size_t dim = size_t{1} << a, dim2 = dim * dim;
  auto to_pauli = [&](const SmallPauli& sp, bool transpose) {
    PauliOperator p(a);
    for (int s = 0; s < a; s++) {
      p.set_x_bit(s, (sp.x >> s) & 1);
      p.set_z_bit(s, (sp.z >> s) & 1);
    }
    Eigen::MatrixXcd m = pauli_matrix(p);
    if (transpose) m.transposeInPlace();
    if (sp.sign) m = -m;
    return m;
  };
  std::vector<Eigen::MatrixXcd> stabs;
  for (int s = 0; s < a; s++) {
    for (int which = 0; which < 2; which++) {
      SmallPauli in{static_cast<uint8_t>(which == 0 ? (1 << s) : 0),
                    static_cast<uint8_t>(which == 0 ? 0 : (1 << s)), 0};
      SmallPauli img = gate.conjugate(in);
      Eigen::MatrixXcd out_side = to_pauli(img, false);
      Eigen::MatrixXcd in_side = to_pauli(in, true);
      Eigen::MatrixXcd full(dim2, dim2);
      for (size_t i = 0; i < dim; i++) {
        for (size_t j = 0; j < dim; j++) {
          full.block(i * dim, j * dim, dim, dim) = in_side(i, j) * out_side;
        }
      }
      stabs.push_back(full);
    }
  }
  for (size_t ref = 0; ref < dim2; ref++) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim2);
    v[ref] = 1;
    for (const auto& s : stabs) {
      v = 0.5 * (v + s * v);
    }
    double norm = v.norm();
    if (norm > 1e-9) {
      v /= norm;
      Eigen::MatrixXcd u(dim, dim);
      for (size_t in = 0; in < dim; in++) {
        for (size_t out = 0; out < dim; out++) {
          u(out, in) = v[in * dim + out] * std::sqrt(double(dim));
        }
      }
      return u;
    }
  }
  throw std::logic_error("Choi projection vanished on every basis state");
}

DenseState DenseState::zero_state(size_t num_sites) {
  check_size(num_sites, 12);
  DenseState s;
  s.n_ = num_sites;
  s.amplitudes_ = Eigen::VectorXcd::Zero(size_t{1} << num_sites);
  s.amplitudes_[0] = 1;
  return s;
}

DenseState DenseState::from_stabilizer(const StabilizerState& state) {
  size_t n = state.num_sites();
  DenseState out;
  out.n_ = n;
  size_t dim = size_t{1} << n;
  if (state.pure()) {
    check_size(n, 12);
    // Sequentially project a basis state through (I+g)/2; some basis state
    // always survives with weight >= 2^-n. Build each generator matrix once,
    // not per candidate.
    std::vector<Eigen::MatrixXcd> gens;
    for (size_t g = 0; g < state.num_generators(); g++) {
      gens.push_back(pauli_matrix(state.generator(g)));
    }
    for (size_t ref = 0; ref < dim; ref++) {
      Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
      v[ref] = 1;
      for (const auto& m : gens) {
        v = 0.5 * (v + m * v);
      }
      if (v.norm() > 1e-9) {
        out.amplitudes_ = v / v.norm();
        return out;
      }
    }
    throw std::logic_error("no basis state survived stabilizer projection");
  }
  check_size(n, 6);
  Eigen::MatrixXcd rho =
      Eigen::MatrixXcd::Identity(dim, dim) / static_cast<double>(dim);
  for (size_t g = 0; g < state.num_generators(); g++) {
    Eigen::MatrixXcd m = pauli_matrix(state.generator(g));
    rho = 0.5 * (rho + m * rho);
  }
  out.density_ = rho / rho.trace().real();
  return out;
}

void DenseState::apply(const CliffordGate& gate, size_t site) {
  if (gate.arity() != 1 || site >= n_) {
    throw std::invalid_argument("bad oracle gate application");
  }
  Eigen::MatrixXcd u = gate_matrix(gate);
  size_t dim = size_t{1} << n_;
  size_t mask = size_t{1} << site;
  auto transform_vector = [&](Eigen::VectorXcd& v) {
    for (size_t i = 0; i < dim; i++) {
      if (i & mask) continue;
      std::complex<double> a0 = v[i], a1 = v[i | mask];
      v[i] = u(0, 0) * a0 + u(0, 1) * a1;
      v[i | mask] = u(1, 0) * a0 + u(1, 1) * a1;
    }
  };
  if (!is_density()) {
    transform_vector(amplitudes_);
    return;
  }
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(dim, dim);
  for (size_t col = 0; col < dim; col++) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
    v[col] = 1;
    transform_vector(v);
    full.col(col) = v;
  }
  density_ = full * density_ * full.adjoint();
}

void DenseState::apply(const CliffordGate& gate, size_t site_a,
                       size_t site_b) {
  if (gate.arity() != 2 || site_a >= n_ || site_b >= n_ || site_a == site_b) {
    throw std::invalid_argument("bad oracle gate application");
  }
  Eigen::MatrixXcd u = gate_matrix(gate);
  size_t dim = size_t{1} << n_;
  size_t ma = size_t{1} << site_a, mb = size_t{1} << site_b;
  auto transform_vector = [&](Eigen::VectorXcd& v) {
    for (size_t i = 0; i < dim; i++) {
      if ((i & ma) || (i & mb)) continue;
      size_t idx[4] = {i, i | ma, i | mb, i | ma | mb};
      std::complex<double> in[4];
      for (int j = 0; j < 4; j++) in[j] = v[idx[j]];
      for (int j = 0; j < 4; j++) {
        v[idx[j]] = u(j, 0) * in[0] + u(j, 1) * in[1] + u(j, 2) * in[2] +
                    u(j, 3) * in[3];
      }
    }
  };
  if (!is_density()) {
    transform_vector(amplitudes_);
    return;
  }
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(dim, dim);
  for (size_t col = 0; col < dim; col++) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
    v[col] = 1;
    transform_vector(v);
    full.col(col) = v;
  }
  density_ = full * density_ * full.adjoint();
}

DenseState::Measurement DenseState::measure_z(size_t site,
                                              std::mt19937_64& rng) {
  double p_plus = 0;
  size_t dim = size_t{1} << n_;
  size_t mask = size_t{1} << site;
  if (!is_density()) {
    for (size_t i = 0; i < dim; i++) {
      if (!(i & mask)) p_plus += std::norm(amplitudes_[i]);
    }
  } else {
    for (size_t i = 0; i < dim; i++) {
      if (!(i & mask)) p_plus += density_(i, i).real();
    }
  }
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int outcome = unif(rng) < p_plus ? +1 : -1;
  force_measure_z(site, outcome);
  return {outcome, p_plus};
}

DenseState::Measurement DenseState::force_measure_z(size_t site,
                                                    int outcome) {
  if (site >= n_) {
    throw std::invalid_argument("site out of range");
  }
  size_t dim = size_t{1} << n_;
  size_t mask = size_t{1} << site;
  double p_plus = 0;
  if (!is_density()) {
    for (size_t i = 0; i < dim; i++) {
      if (!(i & mask)) p_plus += std::norm(amplitudes_[i]);
    }
    double p_branch = outcome > 0 ? p_plus : 1 - p_plus;
    if (p_branch < 1e-12) {
      throw std::logic_error("zero-probability measurement branch");
    }
    for (size_t i = 0; i < dim; i++) {
      bool keep = ((i & mask) == 0) == (outcome > 0);
      if (!keep) amplitudes_[i] = 0;
    }
    amplitudes_ /= std::sqrt(p_branch);
  } else {
    for (size_t i = 0; i < dim; i++) {
      if (!(i & mask)) p_plus += density_(i, i).real();
    }
    double p_branch = outcome > 0 ? p_plus : 1 - p_plus;
    if (p_branch < 1e-12) {
      throw std::logic_error("zero-probability measurement branch");
    }
    for (size_t i = 0; i < dim; i++) {
      for (size_t j = 0; j < dim; j++) {
        bool keep_i = ((i & mask) == 0) == (outcome > 0);
        bool keep_j = ((j & mask) == 0) == (outcome > 0);
        if (!keep_i || !keep_j) density_(i, j) = 0;
      }
    }
    density_ /= p_branch;
  }
  return {outcome, p_plus};
}

double DenseState::entropy_region(const std::vector<uint8_t>& in_region) const {
  if (in_region.size() != n_) {
    throw std::invalid_argument("region mask size mismatch");
  }
  std::vector<size_t> region, rest;
  for (size_t s = 0; s < n_; s++) {
    (in_region[s] ? region : rest).push_back(s);
  }
  if (region.empty()) return 0.0;
  size_t da = size_t{1} << region.size();
  size_t dc = size_t{1} << rest.size();
  auto full_index = [&](size_t a_bits, size_t c_bits) {
    size_t idx = 0;
    for (size_t t = 0; t < region.size(); t++) {
      idx |= ((a_bits >> t) & 1) << region[t];
    }
    for (size_t t = 0; t < rest.size(); t++) {
      idx |= ((c_bits >> t) & 1) << rest[t];
    }
    return idx;
  };
  Eigen::MatrixXcd rho_a = Eigen::MatrixXcd::Zero(da, da);
  for (size_t a = 0; a < da; a++) {
    for (size_t b = 0; b < da; b++) {
      std::complex<double> sum = 0;
      for (size_t c = 0; c < dc; c++) {
        size_t ia = full_index(a, c), ib = full_index(b, c);
        if (!is_density()) {
          sum += amplitudes_[ia] * std::conj(amplitudes_[ib]);
        } else {
          sum += density_(ia, ib);
        }
      }
      rho_a(a, b) = sum;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho_a);
  double entropy = 0;
  for (double lambda : solver.eigenvalues()) {
    if (lambda > 1e-12) {
      entropy -= lambda * std::log2(lambda);
    }
  }
  return entropy;
}

double DenseState::entropy_interval(size_t begin, size_t end) const {
  std::vector<uint8_t> mask(n_, 0);
  for (size_t s = begin; s < end; s++) mask[s] = 1;
  return entropy_region(mask);
}

double DenseState::entropy_total() const {
  if (!is_density()) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(density_);
  double entropy = 0;
  for (double lambda : solver.eigenvalues()) {
    if (lambda > 1e-12) {
      entropy -= lambda * std::log2(lambda);
    }
  }
  return entropy;
}

std::complex<double> DenseState::expectation(const PauliOperator& p) const {
  Eigen::MatrixXcd m = pauli_matrix(p);
  if (!is_density()) {
    return amplitudes_.dot(m * amplitudes_);
  }
  return (m * density_).trace();
}

}  // namespace diffmon
