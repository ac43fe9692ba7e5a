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

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "epsr/epsr.hpp"

namespace epsr {

/// How a fixed shot budget is split across the expanded evaluations.
enum class Scheme { uniform, weighted, custom };

std::string_view to_string(Scheme scheme);
Scheme parse_scheme(std::string_view text);

struct ShotAllocation {
  Scheme scheme = Scheme::uniform;
  Eigen::VectorXd counts;  // one per expanded shift; fractional in predictions
  double total = 0.0;
};

/// Derivative variance in units of sigma^2 / N_total.
struct VarianceReport {
  double predicted_scaled_variance = 0.0;
  Scheme scheme = Scheme::uniform;
  double objective_value = 0.0;
};

/// F_unif(x) = ||b(x)||_2^2 / 2.
double uniform_objective(const ShiftNodes& nodes, const FrequencySet& fs,
                         int order);
/// F_wgt(x) = ||b(x)||_1.
double weighted_objective(const ShiftNodes& nodes, const FrequencySet& fs,
                          int order);

/// -diag(A' A^{-1} b b^T), A' being the row-wise node derivative of the
/// interpolation matrix.
Eigen::VectorXd uniform_objective_gradient(const ShiftNodes& nodes,
                                           const FrequencySet& fs, int order);
/// -diag(A' A^{-1} sgn(b) b^T) with sgn(0) = 0; a true gradient wherever no
/// coefficient vanishes.
Eigen::VectorXd weighted_objective_subgradient(const ShiftNodes& nodes,
                                               const FrequencySet& fs,
                                               int order);

ShotAllocation allocate(Scheme scheme, const Eigen::VectorXd& gamma,
                        double total);

/// Integer shot counts by largest remainder. Every term with a nonzero
/// weight keeps at least one shot so the sampled estimator stays unbiased;
/// zero-weight terms get none.
std::vector<long> round_allocation(const ShotAllocation& allocation,
                                   const Eigen::VectorXd& gamma, long total);

/// Uniform: n * ||b||_2^2 with n = len(b). Weighted: ||b||_1^2.
VarianceReport predicted_variance(const Eigen::VectorXd& b, Parity parity,
                                  Scheme scheme);

/// N_total * sum_mu gamma_mu^2 / N_mu for an arbitrary feasible allocation.
VarianceReport allocation_variance(const Eigen::VectorXd& gamma,
                                   const ShotAllocation& allocation);

struct OptimalityCertificate {
  bool certified = false;
  double weighted_objective = 0.0;  // F_wgt at the equidistant nodes
  double lower_bound = 0.0;         // r^d
  double worst_dual_norm = 0.0;     // max ||A(x) y_lb||_inf over the probes
};

/// Checks that the equidistant nodes attain r^d and that the dual vector
/// y_lb = +-e_r stays feasible on `probes` random node sets, which bounds
/// F_wgt below by r^d everywhere.
OptimalityCertificate certify_equidistant_optimality(std::size_t r, int order,
                                                     std::size_t probes = 200,
                                                     std::uint64_t seed = 0);

}  // namespace epsr
