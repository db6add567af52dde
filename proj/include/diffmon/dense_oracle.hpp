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

#ifndef DIFFMON_DENSE_ORACLE_HPP
#define DIFFMON_DENSE_ORACLE_HPP

#include <Eigen/Dense>
#include <complex>
#include <random>

#include "diffmon/clifford.hpp"
#include "diffmon/pauli.hpp"
#include "diffmon/stabilizer.hpp"

namespace diffmon {

// Brute-force simulator used only to validate the stabilizer core. Pure
// states are statevectors (N <= 12), mixed states density matrices (N <= 6).
// Site 0 is the least significant bit of the basis index.
class DenseState {
 public:
  static DenseState zero_state(size_t num_sites);
  // Builds the projector product over the stabilizer group; works for pure
  // and mixed inputs (mixed always goes to a density matrix).
  static DenseState from_stabilizer(const StabilizerState& state);

  size_t num_sites() const { return n_; }
  bool is_density() const { return density_.size() > 0; }

  void apply(const CliffordGate& gate, size_t site);
  void apply(const CliffordGate& gate, size_t site_a, size_t site_b);

  struct Measurement {
    int outcome;
    double prob_plus;  // Born probability of the +1 branch before collapse
  };
  Measurement measure_z(size_t site, std::mt19937_64& rng);
  // Collapses onto a chosen branch; throws on a zero-probability branch.
  Measurement force_measure_z(size_t site, int outcome);

  double entropy_region(const std::vector<uint8_t>& in_region) const;
  double entropy_interval(size_t begin, size_t end) const;
  double entropy_total() const;

  std::complex<double> expectation(const PauliOperator& p) const;

 private:
  size_t n_ = 0;
  Eigen::VectorXcd amplitudes_;
  Eigen::MatrixXcd density_;
};

// 2^n x 2^n matrix of a pauli operator, phase included.
Eigen::MatrixXcd pauli_matrix(const PauliOperator& p);

// Unitary of a 1- or 2-site gate, reconstructed from its tableau through
// the Choi state; defined up to global phase.
Eigen::MatrixXcd gate_matrix(const CliffordGate& gate);

}  // namespace diffmon

#endif
