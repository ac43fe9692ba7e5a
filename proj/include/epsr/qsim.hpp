// Copyright 2026 The EPSR Toolkit Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "epsr/error.hpp"
#include "epsr/spectra.hpp"

namespace epsr::qsim {

using Complex = std::complex<double>;

/// Dense simulation only.
inline constexpr int kMaxQubits = 12;

/// Basis index b encodes qubit i in bit i.
class StateVector {
 public:
  explicit StateVector(int qubits);  // |0...0>
  StateVector(int qubits, Eigen::VectorXcd amplitudes);

  int qubits() const { return qubits_; }
  Eigen::Index dimension() const { return amplitudes_.size(); }
  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
  Eigen::VectorXcd& amplitudes() { return amplitudes_; }
  double norm() const { return amplitudes_.norm(); }

 private:
  int qubits_;
  Eigen::VectorXcd amplitudes_;
};

enum class GateKind { x, h, cnot, rxx, ryy, rzz };

std::string_view to_string(GateKind kind);
GateKind parse_gate_kind(std::string_view name);

/// Rotations act as exp(-i x/2 P (x) P). CNOT lists (control, target).
struct Gate {
  GateKind kind = GateKind::x;
  std::vector<int> qubits;
  std::optional<std::size_t> param;
};

struct Circuit {
  int qubits = 1;
  std::vector<Gate> gates;
  std::size_t num_params = 0;
};

/// Throws a validation error on bad qubit indices, arity or parameter refs.
void validate(const Circuit& circuit);

void apply_gate(StateVector& state, const Gate& gate, double angle = 0.0);
StateVector apply_circuit(const Circuit& circuit, const Eigen::VectorXd& theta);

/// pauli[i] acts on qubit i.
struct PauliTerm {
  double coeff = 0.0;
  std::string pauli;
};

struct PauliSum {
  int qubits = 1;
  std::vector<PauliTerm> terms;

  /// sum |coeff|, an upper bound on the operator norm.
  double coefficient_norm() const;
};

void validate(const PauliSum& observable);

Eigen::VectorXcd apply_pauli(std::string_view pauli, const Eigen::VectorXcd& v);
Eigen::VectorXcd apply_observable(const PauliSum& observable,
                                  const Eigen::VectorXcd& v);
Eigen::MatrixXcd to_matrix(const PauliSum& observable);

double expectation(const StateVector& state, const PauliSum& observable);
/// <C^2> - <C>^2.
double one_shot_variance(const StateVector& state, const PauliSum& observable);

/// Measures in the observable eigenbasis. The eigendecomposition happens once
/// at construction; sampling is const and safe to call concurrently.
class ObservableSampler {
 public:
  explicit ObservableSampler(const PauliSum& observable);

  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  /// Mean of `shots` single-shot outcomes.
  double sample(const StateVector& state, long shots, std::uint64_t seed) const;

 private:
  int qubits_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXcd eigenvectors_;
};

double sample_expectation(const StateVector& state, const PauliSum& observable,
                          long shots, std::uint64_t seed);

/// sum_i X_i X_{i+1} + Y_i Y_{i+1} + delta Z_i Z_{i+1}, periodic. The ZZ
/// terms are omitted when delta is zero.
PauliSum build_xxz_hamiltonian(int qubits, double delta);

/// Depth-p HVA with parameters (theta_l, phi_l, beta_l, gamma_l) per layer.
/// Even bonds are (2k, 2k+1), odd bonds (2k+1, 2k+2); for even q the wrap
/// bond (q-1, 0) joins the odd group.
Circuit build_hva_circuit(int qubits, int layers);

enum class NoiseModel {
  exact,
  multinomial,  // shots drawn in the observable eigenbasis
  gaussian,     // f + N(0, sigma^2 / shots); fast surrogate
};

std::string_view to_string(NoiseModel model);

/// x -> f(theta_bar with theta_j = x).
class CostSlice {
 public:
  CostSlice(Circuit circuit, PauliSum observable, Eigen::VectorXd theta_bar,
            std::size_t index);

  double operator()(double x) const;
  double evaluate(double x, NoiseModel model, long shots,
                  std::uint64_t seed) const;
  StateVector state(double x) const;
  double one_shot_variance(double x) const;

  const Circuit& circuit() const { return *circuit_; }
  const PauliSum& observable() const { return *observable_; }
  const Eigen::VectorXd& theta_bar() const { return theta_bar_; }
  std::size_t index() const { return index_; }
  double base_point() const { return theta_bar_[static_cast<Eigen::Index>(index_)]; }

 private:
  const ObservableSampler& sampler() const;

  std::shared_ptr<const Circuit> circuit_;
  std::shared_ptr<const PauliSum> observable_;
  Eigen::VectorXd theta_bar_;
  std::size_t index_;
  struct Cache;
  std::shared_ptr<Cache> cache_;
};

/// Hermitian G with U_j(x) = exp(-i x G), summed over the gates bound to
/// parameter j. Those gates must be contiguous and mutually commuting.
Eigen::MatrixXcd generator_matrix(const Circuit& circuit, std::size_t index);

/// Positive eigenvalue differences of the parameter's generator, with
/// near-integer gaps snapped to integers.
FrequencySet generator_frequencies(const Circuit& circuit, std::size_t index);

/// Generator frequencies whose Fourier amplitude in this slice exceeds
/// rel_tol * ||C||. A frequency can cancel once the state and observable are
/// fixed, so this set may be strictly smaller than generator_frequencies.
FrequencySet slice_frequencies(const CostSlice& slice, double rel_tol = 1e-9);

/// Fourier amplitudes |c_w| of the slice, one per generator frequency.
std::vector<std::pair<double, double>> slice_spectrum(const CostSlice& slice);

std::string circuit_to_json(const Circuit& circuit, const PauliSum* observable);
Circuit circuit_from_json(std::string_view text);
PauliSum observable_from_json(std::string_view text);

}  // namespace epsr::qsim
