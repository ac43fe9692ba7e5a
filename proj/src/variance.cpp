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

#include "epsr/variance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include <fmt/format.h>

namespace epsr {
namespace {

Eigen::MatrixXd derivative_matrix(const ShiftNodes& nodes,
                                  const FrequencySet& fs) {
  return nodes.parity == Parity::odd
             ? build_A_odd_derivative(nodes.values, fs)
             : build_A_even_derivative(nodes.values, fs);
}

// -diag(A' A^{-1} v b^T) = -(A' A^{-1} v) .* b
Eigen::VectorXd diag_gradient(const ShiftNodes& nodes, const FrequencySet& fs,
                              const Eigen::VectorXd& b,
                              const Eigen::VectorXd& v) {
  const Eigen::MatrixXd a = interpolation_matrix(nodes, fs);
  const Eigen::VectorXd w = a.fullPivLu().solve(v);
  return -(derivative_matrix(nodes, fs) * w).cwiseProduct(b);
}

}  // namespace

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::uniform:
      return "uniform";
    case Scheme::weighted:
      return "weighted";
    case Scheme::custom:
      return "custom";
  }
  return "?";
}

Scheme parse_scheme(std::string_view text) {
  if (text == "uniform" || text == "unif") return Scheme::uniform;
  if (text == "weighted" || text == "wgt") return Scheme::weighted;
  if (text == "custom") return Scheme::custom;
  fail(ErrorKind::validation, fmt::format("unknown shot scheme '{}'", text));
}

double uniform_objective(const ShiftNodes& nodes, const FrequencySet& fs,
                         int order) {
  return 0.5 * solve_coefficients(nodes, fs, order).b.squaredNorm();
}

double weighted_objective(const ShiftNodes& nodes, const FrequencySet& fs,
                          int order) {
  return solve_coefficients(nodes, fs, order).b.lpNorm<1>();
}

Eigen::VectorXd uniform_objective_gradient(const ShiftNodes& nodes,
                                           const FrequencySet& fs, int order) {
  const Eigen::VectorXd b = solve_coefficients(nodes, fs, order).b;
  return diag_gradient(nodes, fs, b, b);
}

Eigen::VectorXd weighted_objective_subgradient(const ShiftNodes& nodes,
                                               const FrequencySet& fs,
                                               int order) {
  const Eigen::VectorXd b = solve_coefficients(nodes, fs, order).b;
  const Eigen::VectorXd sign = b.unaryExpr(
      [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
  return diag_gradient(nodes, fs, b, sign);
}

ShotAllocation allocate(Scheme scheme, const Eigen::VectorXd& gamma,
                        double total) {
  if (!(total > 0.0)) fail(ErrorKind::validation, "N_total must be positive");
  if (gamma.size() == 0 || gamma.cwiseAbs().maxCoeff() == 0.0)
    fail(ErrorKind::validation, "coefficient vector is identically zero");
  ShotAllocation out{scheme, Eigen::VectorXd(gamma.size()), total};
  switch (scheme) {
    case Scheme::uniform:
      out.counts.setConstant(total / static_cast<double>(gamma.size()));
      break;
    case Scheme::weighted:
      out.counts = total * gamma.cwiseAbs() / gamma.lpNorm<1>();
      break;
    case Scheme::custom:
      fail(ErrorKind::validation,
           "custom allocations are supplied by the caller");
  }
  return out;
}

std::vector<long> round_allocation(const ShotAllocation& allocation,
                                   const Eigen::VectorXd& gamma, long total) {
  const auto n = static_cast<std::size_t>(allocation.counts.size());
  std::vector<long> shots(n, 0);
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < n; ++i)
    if (gamma[static_cast<Eigen::Index>(i)] != 0.0 &&
        allocation.counts[static_cast<Eigen::Index>(i)] > 0.0)
      active.push_back(i);
  if (static_cast<long>(active.size()) > total)
    fail(ErrorKind::validation,
         fmt::format("{} shots cannot cover {} evaluations", total,
                     active.size()));

  const double scale = static_cast<double>(total) / allocation.total;
  std::vector<double> remainder(n, 0.0);
  long assigned = 0;
  for (std::size_t i : active) {
    const double exact = allocation.counts[static_cast<Eigen::Index>(i)] * scale;
    shots[i] = std::max(1L, static_cast<long>(std::floor(exact)));
    remainder[i] = exact - std::floor(exact);
    assigned += shots[i];
  }
  std::vector<std::size_t> order = active;
  // Largest remainder first; ties broken by index for determinism.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainder[a] > remainder[b];
  });
  for (std::size_t k = 0; assigned < total; k = (k + 1) % order.size()) {
    ++shots[order[k]];
    ++assigned;
  }
  // The at-least-one floor can overshoot; take back from the largest counts.
  while (assigned > total) {
    auto it = std::max_element(shots.begin(), shots.end());
    --*it;
    --assigned;
  }
  return shots;
}

VarianceReport predicted_variance(const Eigen::VectorXd& b, Parity parity,
                                  Scheme scheme) {
  (void)parity;  // len(b) already is r (odd) or r+1 (even)
  VarianceReport report;
  report.scheme = scheme;
  switch (scheme) {
    case Scheme::uniform:
      report.predicted_scaled_variance =
          static_cast<double>(b.size()) * b.squaredNorm();
      report.objective_value = 0.5 * b.squaredNorm();
      break;
    case Scheme::weighted: {
      const double l1 = b.lpNorm<1>();
      report.predicted_scaled_variance = l1 * l1;
      report.objective_value = l1;
      break;
    }
    case Scheme::custom:
      fail(ErrorKind::validation,
           "custom schemes need an explicit allocation; use "
           "allocation_variance");
  }
  return report;
}

VarianceReport allocation_variance(const Eigen::VectorXd& gamma,
                                   const ShotAllocation& allocation) {
  if (gamma.size() != allocation.counts.size())
    fail(ErrorKind::validation, "allocation length mismatch");
  double sum = 0.0;
  for (Eigen::Index mu = 0; mu < gamma.size(); ++mu) {
    if (gamma[mu] == 0.0) continue;
    if (!(allocation.counts[mu] > 0.0))
      fail(ErrorKind::validation, "a weighted term received no shots");
    sum += gamma[mu] * gamma[mu] / allocation.counts[mu];
  }
  return {allocation.total * sum, allocation.scheme, sum};
}

OptimalityCertificate certify_equidistant_optimality(std::size_t r, int order,
                                                     std::size_t probes,
                                                     std::uint64_t seed) {
  const FrequencySet fs = FrequencySet::integers(r);
  const Parity parity = parity_of(order);
  OptimalityCertificate cert;
  cert.lower_bound = std::pow(static_cast<double>(r), order);
  cert.weighted_objective =
      weighted_objective(equidistant_nodes(r, parity), fs, order);

  // y_lb selects the last column of A(x): sin(r x_i) or cos(r x_i).
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> node(-2.0 * std::numbers::pi,
                                              2.0 * std::numbers::pi);
  const Eigen::Index n = parity == Parity::odd ? static_cast<Eigen::Index>(r)
                                               : static_cast<Eigen::Index>(r + 1);
  const Eigen::VectorXd rhs = rhs_vector(order, fs, parity);
  Eigen::VectorXd y_lb = Eigen::VectorXd::Zero(n);
  y_lb[n - 1] = rhs[n - 1] > 0.0 ? 1.0 : -1.0;
  for (std::size_t t = 0; t < probes; ++t) {
    ShiftNodes probe{parity, Eigen::VectorXd(n)};
    for (Eigen::Index i = 0; i < n; ++i) probe.values[i] = node(rng);
    const double dual_norm =
        (interpolation_matrix(probe, fs) * y_lb).cwiseAbs().maxCoeff();
    cert.worst_dual_norm = std::max(cert.worst_dual_norm, dual_norm);
  }
  const bool attains = std::abs(cert.weighted_objective - cert.lower_bound) <=
                       1e-9 * cert.lower_bound;
  // p^T y_lb = r^d is the weak-duality bound.
  const bool bound_ok = std::abs(rhs.dot(y_lb) - cert.lower_bound) <=
                        1e-12 * cert.lower_bound;
  cert.certified = attains && bound_ok && cert.worst_dual_norm <= 1.0 + 1e-12;
  return cert;
}

}  // namespace epsr
