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

#include "epsr/qsim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>
#include <random>

#include <fmt/format.h>
#include <json.hpp>

namespace epsr::qsim {
namespace {

constexpr double kHalfSqrt2 = 0.70710678118654752440;

void check_qubits(int qubits) {
  if (qubits < 1 || qubits > kMaxQubits)
    fail(ErrorKind::validation,
         fmt::format("qubit count {} outside 1..{}", qubits, kMaxQubits));
}

Eigen::Index dim_of(int qubits) { return Eigen::Index{1} << qubits; }

std::string pair_string(int qubits, int a, int b, char p) {
  std::string s(static_cast<std::size_t>(qubits), 'I');
  s[static_cast<std::size_t>(a)] = p;
  s[static_cast<std::size_t>(b)] = p;
  return s;
}

char rotation_pauli(GateKind kind) {
  switch (kind) {
    case GateKind::rxx: return 'X';
    case GateKind::ryy: return 'Y';
    case GateKind::rzz: return 'Z';
    default: return 'I';
  }
}

bool is_rotation(GateKind kind) { return rotation_pauli(kind) != 'I'; }

void apply_range(StateVector& state, const Circuit& circuit, std::size_t begin,
                 std::size_t end, const Eigen::VectorXd& theta) {
  for (std::size_t g = begin; g < end; ++g) {
    const Gate& gate = circuit.gates[g];
    const double angle =
        gate.param ? theta[static_cast<Eigen::Index>(*gate.param)] : 0.0;
    apply_gate(state, gate, angle);
  }
}

// Positions of the gates bound to `index`; they must form one block.
std::pair<std::size_t, std::size_t> parameter_block(const Circuit& circuit,
                                                    std::size_t index) {
  if (index >= circuit.num_params)
    fail(ErrorKind::validation,
         fmt::format("parameter {} out of range 0..{}", index,
                     circuit.num_params));
  std::size_t first = circuit.gates.size();
  std::size_t last = 0;
  std::size_t count = 0;
  for (std::size_t g = 0; g < circuit.gates.size(); ++g) {
    if (circuit.gates[g].param == index) {
      first = std::min(first, g);
      last = g;
      ++count;
    }
  }
  if (count == 0)
    fail(ErrorKind::validation, fmt::format("parameter {} is unused", index));
  if (last - first + 1 != count)
    fail(ErrorKind::validation,
         fmt::format("gates of parameter {} are not contiguous", index));
  return {first, last + 1};
}

}  // namespace

StateVector::StateVector(int qubits) : qubits_(qubits) {
  check_qubits(qubits);
  amplitudes_ = Eigen::VectorXcd::Zero(dim_of(qubits));
  amplitudes_[0] = 1.0;
}

StateVector::StateVector(int qubits, Eigen::VectorXcd amplitudes)
    : qubits_(qubits), amplitudes_(std::move(amplitudes)) {
  check_qubits(qubits);
  if (amplitudes_.size() != dim_of(qubits))
    fail(ErrorKind::validation, "amplitude count does not match 2^q");
}

std::string_view to_string(GateKind kind) {
  switch (kind) {
    case GateKind::x: return "X";
    case GateKind::h: return "H";
    case GateKind::cnot: return "CNOT";
    case GateKind::rxx: return "RXX";
    case GateKind::ryy: return "RYY";
    case GateKind::rzz: return "RZZ";
  }
  return "?";
}

GateKind parse_gate_kind(std::string_view name) {
  for (GateKind k : {GateKind::x, GateKind::h, GateKind::cnot, GateKind::rxx,
                     GateKind::ryy, GateKind::rzz})
    if (to_string(k) == name) return k;
  fail(ErrorKind::validation, fmt::format("unknown gate '{}'", name));
}

void validate(const Circuit& circuit) {
  check_qubits(circuit.qubits);
  for (const Gate& gate : circuit.gates) {
    const std::size_t arity =
        gate.kind == GateKind::x || gate.kind == GateKind::h ? 1 : 2;
    if (gate.qubits.size() != arity)
      fail(ErrorKind::validation,
           fmt::format("{} expects {} qubit(s)", to_string(gate.kind), arity));
    for (int q : gate.qubits)
      if (q < 0 || q >= circuit.qubits)
        fail(ErrorKind::validation, fmt::format("qubit index {} out of range", q));
    if (arity == 2 && gate.qubits[0] == gate.qubits[1])
      fail(ErrorKind::validation, "two-qubit gate on a single qubit");
    if (is_rotation(gate.kind) != gate.param.has_value())
      fail(ErrorKind::validation,
           fmt::format("{} parameter binding mismatch", to_string(gate.kind)));
    if (gate.param && *gate.param >= circuit.num_params)
      fail(ErrorKind::validation,
           fmt::format("parameter reference {} out of range", *gate.param));
  }
}

void apply_gate(StateVector& state, const Gate& gate, double angle) {
  Eigen::VectorXcd& psi = state.amplitudes();
  const Eigen::Index dim = psi.size();
  switch (gate.kind) {
    case GateKind::x: {
      const Eigen::Index m = Eigen::Index{1} << gate.qubits[0];
      for (Eigen::Index b = 0; b < dim; ++b)
        if (!(b & m)) std::swap(psi[b], psi[b | m]);
      break;
    }
    case GateKind::h: {
      const Eigen::Index m = Eigen::Index{1} << gate.qubits[0];
      for (Eigen::Index b = 0; b < dim; ++b) {
        if (b & m) continue;
        const Complex a0 = psi[b];
        const Complex a1 = psi[b | m];
        psi[b] = kHalfSqrt2 * (a0 + a1);
        psi[b | m] = kHalfSqrt2 * (a0 - a1);
      }
      break;
    }
    case GateKind::cnot: {
      const Eigen::Index c = Eigen::Index{1} << gate.qubits[0];
      const Eigen::Index t = Eigen::Index{1} << gate.qubits[1];
      for (Eigen::Index b = 0; b < dim; ++b)
        if ((b & c) && !(b & t)) std::swap(psi[b], psi[b | t]);
      break;
    }
    case GateKind::rxx:
    case GateKind::ryy:
    case GateKind::rzz: {
      const std::string p = pair_string(state.qubits(), gate.qubits[0],
                                        gate.qubits[1], rotation_pauli(gate.kind));
      const Eigen::VectorXcd pp = apply_pauli(p, psi);
      psi = std::cos(angle / 2) * psi - Complex(0.0, std::sin(angle / 2)) * pp;
      break;
    }
  }
}

StateVector apply_circuit(const Circuit& circuit, const Eigen::VectorXd& theta) {
  validate(circuit);
  if (static_cast<std::size_t>(theta.size()) != circuit.num_params)
    fail(ErrorKind::validation,
         fmt::format("expected {} parameters, got {}", circuit.num_params,
                     theta.size()));
  StateVector state(circuit.qubits);
  apply_range(state, circuit, 0, circuit.gates.size(), theta);
  return state;
}

double PauliSum::coefficient_norm() const {
  double s = 0.0;
  for (const auto& t : terms) s += std::abs(t.coeff);
  return s;
}

void validate(const PauliSum& observable) {
  check_qubits(observable.qubits);
  for (const auto& t : observable.terms) {
    if (t.pauli.size() != static_cast<std::size_t>(observable.qubits))
      fail(ErrorKind::validation,
           fmt::format("Pauli string '{}' has length != {}", t.pauli,
                       observable.qubits));
    if (t.pauli.find_first_not_of("IXYZ") != std::string::npos)
      fail(ErrorKind::validation,
           fmt::format("Pauli string '{}' has letters outside IXYZ", t.pauli));
    if (!std::isfinite(t.coeff))
      fail(ErrorKind::validation, "non-finite Pauli coefficient");
  }
}

Eigen::VectorXcd apply_pauli(std::string_view pauli, const Eigen::VectorXcd& v) {
  // Y = i X Z on each qubit.
  std::uint64_t xmask = 0, zmask = 0;
  int ny = 0;
  for (std::size_t i = 0; i < pauli.size(); ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    switch (pauli[i]) {
      case 'X': xmask |= bit; break;
      case 'Y': xmask |= bit; zmask |= bit; ++ny; break;
      case 'Z': zmask |= bit; break;
      default: break;
    }
  }
  static const Complex kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const Complex phase = kIPow[ny % 4];
  Eigen::VectorXcd out(v.size());
  for (Eigen::Index b = 0; b < v.size(); ++b) {
    const auto ub = static_cast<std::uint64_t>(b);
    const double sign = (std::popcount(ub & zmask) & 1) ? -1.0 : 1.0;
    out[static_cast<Eigen::Index>(ub ^ xmask)] = phase * sign * v[b];
  }
  return out;
}

Eigen::VectorXcd apply_observable(const PauliSum& observable,
                                  const Eigen::VectorXcd& v) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(v.size());
  for (const auto& t : observable.terms) out += t.coeff * apply_pauli(t.pauli, v);
  return out;
}

Eigen::MatrixXcd to_matrix(const PauliSum& observable) {
  validate(observable);
  const Eigen::Index dim = dim_of(observable.qubits);
  Eigen::MatrixXcd m(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c)
    m.col(c) = apply_observable(observable, Eigen::VectorXcd::Unit(dim, c));
  return m;
}

double expectation(const StateVector& state, const PauliSum& observable) {
  if (state.qubits() != observable.qubits)
    fail(ErrorKind::validation, "state and observable sizes differ");
  const Complex e =
      state.amplitudes().dot(apply_observable(observable, state.amplitudes()));
  if (std::abs(e.imag()) > 1e-10 * std::max(1.0, std::abs(e.real())))
    fail(ErrorKind::numerical,
         fmt::format("expectation has imaginary part {:.3e}", e.imag()));
  return e.real();
}

double one_shot_variance(const StateVector& state, const PauliSum& observable) {
  if (state.qubits() != observable.qubits)
    fail(ErrorKind::validation, "state and observable sizes differ");
  const Eigen::VectorXcd c_psi = apply_observable(observable, state.amplitudes());
  const double mean = state.amplitudes().dot(c_psi).real();
  return c_psi.squaredNorm() - mean * mean;
}

ObservableSampler::ObservableSampler(const PauliSum& observable)
    : qubits_(observable.qubits) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
      to_matrix(observable));
  if (solver.info() != Eigen::Success)
    fail(ErrorKind::numerical, "observable eigendecomposition failed");
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
}

double ObservableSampler::sample(const StateVector& state, long shots,
                                 std::uint64_t seed) const {
  if (shots < 1) fail(ErrorKind::validation, "shots must be positive");
  if (state.qubits() != qubits_)
    fail(ErrorKind::validation, "state and observable sizes differ");
  const Eigen::VectorXd probs =
      (eigenvectors_.adjoint() * state.amplitudes()).cwiseAbs2();
  std::discrete_distribution<Eigen::Index> outcome(probs.data(),
                                                   probs.data() + probs.size());
  std::mt19937_64 rng(seed);
  double sum = 0.0;
  for (long s = 0; s < shots; ++s) sum += eigenvalues_[outcome(rng)];
  return sum / static_cast<double>(shots);
}

double sample_expectation(const StateVector& state, const PauliSum& observable,
                          long shots, std::uint64_t seed) {
  return ObservableSampler(observable).sample(state, shots, seed);
}

PauliSum build_xxz_hamiltonian(int qubits, double delta) {
  if (qubits < 3) fail(ErrorKind::validation, "XXZ chain needs q >= 3");
  check_qubits(qubits);
  PauliSum h{qubits, {}};
  for (char p : {'X', 'Y', 'Z'}) {
    const double c = p == 'Z' ? delta : 1.0;
    if (c == 0.0) continue;
    for (int i = 0; i < qubits; ++i)
      h.terms.push_back({c, pair_string(qubits, i, (i + 1) % qubits, p)});
  }
  return h;
}

Circuit build_hva_circuit(int qubits, int layers) {
  if (qubits < 3) fail(ErrorKind::validation, "HVA needs q >= 3");
  if (layers < 1) fail(ErrorKind::validation, "HVA needs p >= 1");
  check_qubits(qubits);

  std::vector<std::pair<int, int>> even_bonds, odd_bonds;
  for (int k = 0; 2 * k + 1 < qubits; ++k) even_bonds.emplace_back(2 * k, 2 * k + 1);
  for (int k = 0; 2 * k + 2 < qubits; ++k) odd_bonds.emplace_back(2 * k + 1, 2 * k + 2);
  if (qubits % 2 == 0) odd_bonds.emplace_back(qubits - 1, 0);

  Circuit c{qubits, {}, static_cast<std::size_t>(4 * layers)};
  for (int i = 0; i < qubits; ++i) c.gates.push_back({GateKind::x, {i}, {}});
  for (auto [a, b] : even_bonds) c.gates.push_back({GateKind::h, {a}, {}});
  for (auto [a, b] : even_bonds) c.gates.push_back({GateKind::cnot, {a, b}, {}});

  auto group = [&c](const std::vector<std::pair<int, int>>& bonds, GateKind kind,
                    std::size_t param) {
    for (auto [a, b] : bonds) c.gates.push_back({kind, {a, b}, param});
  };
  for (int l = 0; l < layers; ++l) {
    const auto base = static_cast<std::size_t>(4 * l);
    group(odd_bonds, GateKind::rzz, base);
    group(odd_bonds, GateKind::ryy, base + 1);
    group(odd_bonds, GateKind::rxx, base + 1);
    group(even_bonds, GateKind::rzz, base + 2);
    group(even_bonds, GateKind::ryy, base + 3);
    group(even_bonds, GateKind::rxx, base + 3);
  }
  return c;
}

std::string_view to_string(NoiseModel model) {
  switch (model) {
    case NoiseModel::exact: return "exact";
    case NoiseModel::multinomial: return "multinomial";
    case NoiseModel::gaussian: return "gaussian";
  }
  return "?";
}

struct CostSlice::Cache {
  std::once_flag once;
  std::unique_ptr<ObservableSampler> sampler;
};

CostSlice::CostSlice(Circuit circuit, PauliSum observable,
                     Eigen::VectorXd theta_bar, std::size_t index)
    : circuit_(std::make_shared<const Circuit>(std::move(circuit))),
      observable_(std::make_shared<const PauliSum>(std::move(observable))),
      theta_bar_(std::move(theta_bar)),
      index_(index),
      cache_(std::make_shared<Cache>()) {
  validate(*circuit_);
  validate(*observable_);
  if (circuit_->qubits != observable_->qubits)
    fail(ErrorKind::validation, "circuit and observable sizes differ");
  if (static_cast<std::size_t>(theta_bar_.size()) != circuit_->num_params)
    fail(ErrorKind::validation, "theta_bar length does not match the circuit");
  if (index_ >= circuit_->num_params)
    fail(ErrorKind::validation,
         fmt::format("parameter index {} out of range", index_));
}

StateVector CostSlice::state(double x) const {
  Eigen::VectorXd theta = theta_bar_;
  theta[static_cast<Eigen::Index>(index_)] = x;
  return apply_circuit(*circuit_, theta);
}

double CostSlice::operator()(double x) const {
  return expectation(state(x), *observable_);
}

double CostSlice::one_shot_variance(double x) const {
  return qsim::one_shot_variance(state(x), *observable_);
}

const ObservableSampler& CostSlice::sampler() const {
  std::call_once(cache_->once, [this] {
    cache_->sampler = std::make_unique<ObservableSampler>(*observable_);
  });
  return *cache_->sampler;
}

double CostSlice::evaluate(double x, NoiseModel model, long shots,
                           std::uint64_t seed) const {
  switch (model) {
    case NoiseModel::exact:
      return (*this)(x);
    case NoiseModel::multinomial:
      return sampler().sample(state(x), shots, seed);
    case NoiseModel::gaussian: {
      if (shots < 1) fail(ErrorKind::validation, "shots must be positive");
      const StateVector psi = state(x);
      const double mean = expectation(psi, *observable_);
      const double var =
          std::max(0.0, qsim::one_shot_variance(psi, *observable_));
      std::mt19937_64 rng(seed);
      std::normal_distribution<double> noise(0.0, 1.0);
      return mean + std::sqrt(var / static_cast<double>(shots)) * noise(rng);
    }
  }
  return 0.0;
}

Eigen::MatrixXcd generator_matrix(const Circuit& circuit, std::size_t index) {
  validate(circuit);
  const auto [first, last] = parameter_block(circuit, index);
  std::vector<Eigen::MatrixXcd> parts;
  for (std::size_t g = first; g < last; ++g) {
    const Gate& gate = circuit.gates[g];
    PauliSum term{circuit.qubits,
                  {{0.5, pair_string(circuit.qubits, gate.qubits[0],
                                     gate.qubits[1], rotation_pauli(gate.kind))}}};
    parts.push_back(to_matrix(term));
  }
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(parts[0].rows(), parts[0].cols());
  for (std::size_t a = 0; a < parts.size(); ++a) {
    for (std::size_t b = a + 1; b < parts.size(); ++b)
      if ((parts[a] * parts[b] - parts[b] * parts[a]).norm() > 1e-10)
        fail(ErrorKind::validation,
             fmt::format("gates of parameter {} do not commute", index));
    g += parts[a];
  }
  return g;
}

FrequencySet generator_frequencies(const Circuit& circuit, std::size_t index) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
      generator_matrix(circuit, index), Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = solver.eigenvalues();
  return snap_to_integers(positive_difference_frequencies(
      {ev.data(), static_cast<std::size_t>(ev.size())}));
}

std::vector<std::pair<double, double>> slice_spectrum(const CostSlice& slice) {
  const Circuit& circuit = slice.circuit();
  const auto [first, last] = parameter_block(circuit, slice.index());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
      generator_matrix(circuit, slice.index()));
  const Eigen::VectorXd& lambda = solver.eigenvalues();
  const Eigen::MatrixXcd& v = solver.eigenvectors();

  // psi(x) = sum_k e^{-i lambda_k x} w_k with w_k = U_after a_k v_k.
  StateVector pre(circuit.qubits);
  apply_range(pre, circuit, 0, first, slice.theta_bar());
  const Eigen::VectorXcd a = v.adjoint() * pre.amplitudes();
  const Eigen::Index dim = lambda.size();
  Eigen::MatrixXcd w(dim, dim), cw(dim, dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    StateVector s(circuit.qubits, a[k] * v.col(k));
    apply_range(s, circuit, last, circuit.gates.size(), slice.theta_bar());
    w.col(k) = s.amplitudes();
    cw.col(k) = apply_observable(slice.observable(), s.amplitudes());
  }
  const Eigen::MatrixXcd m = w.adjoint() * cw;

  const FrequencySet fs = generator_frequencies(circuit, slice.index());
  const double tol = kDefaultDedupTol * std::max(1.0, lambda.cwiseAbs().maxCoeff());
  std::vector<std::pair<double, double>> out;
  for (std::size_t f = 0; f < fs.size(); ++f) {
    Complex c = 0.0;
    for (Eigen::Index k = 0; k < dim; ++k)
      for (Eigen::Index l = 0; l < dim; ++l)
        if (std::abs(lambda[k] - lambda[l] - fs[f]) <= tol) c += m(k, l);
    out.emplace_back(fs[f], 2.0 * std::abs(c));
  }
  return out;
}

FrequencySet slice_frequencies(const CostSlice& slice, double rel_tol) {
  const double floor = rel_tol * std::max(1.0, slice.observable().coefficient_norm());
  std::vector<double> kept;
  for (auto [omega, amplitude] : slice_spectrum(slice))
    if (amplitude > floor) kept.push_back(omega);
  if (kept.empty())
    fail(ErrorKind::validation, "slice is constant, no frequencies");
  return FrequencySet(std::move(kept));
}

std::string circuit_to_json(const Circuit& circuit, const PauliSum* observable) {
  nlohmann::ordered_json j;
  j["q"] = circuit.qubits;
  j["num_params"] = circuit.num_params;
  j["gates"] = nlohmann::ordered_json::array();
  for (const Gate& g : circuit.gates) {
    nlohmann::ordered_json gj;
    gj["name"] = to_string(g.kind);
    gj["qubits"] = g.qubits;
    if (g.param) gj["param"] = *g.param;
    j["gates"].push_back(gj);
  }
  if (observable) {
    j["terms"] = nlohmann::ordered_json::array();
    for (const auto& t : observable->terms)
      j["terms"].push_back({{"coeff", t.coeff}, {"pauli", t.pauli}});
  }
  return j.dump(2);
}

Circuit circuit_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    Circuit c;
    c.qubits = j.at("q").get<int>();
    std::size_t max_param = 0;
    bool any = false;
    for (const auto& gj : j.at("gates")) {
      Gate g;
      g.kind = parse_gate_kind(gj.at("name").get<std::string>());
      g.qubits = gj.at("qubits").get<std::vector<int>>();
      if (gj.contains("param")) {
        g.param = gj.at("param").get<std::size_t>();
        max_param = std::max(max_param, *g.param);
        any = true;
      }
      c.gates.push_back(std::move(g));
    }
    c.num_params = j.contains("num_params") ? j.at("num_params").get<std::size_t>()
                                            : (any ? max_param + 1 : 0);
    validate(c);
    return c;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::config, fmt::format("circuit JSON: {}", e.what()));
  }
}

PauliSum observable_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    PauliSum obs{j.at("q").get<int>(), {}};
    for (const auto& tj : j.at("terms"))
      obs.terms.push_back(
          {tj.at("coeff").get<double>(), tj.at("pauli").get<std::string>()});
    validate(obs);
    return obs;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::config, fmt::format("observable JSON: {}", e.what()));
  }
}

}  // namespace epsr::qsim
