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

#include <algorithm>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "epsr/epsr.hpp"
#include "epsr/finite_difference.hpp"

namespace epsr::testing {

inline constexpr double kPi = std::numbers::pi;

/// Seeded source for the property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  int integer(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }
  std::uint64_t seed() { return rng_(); }

  /// Random nodes in (0, pi) for odd parity; even parity draws x_0 too
  /// unless pin_zero. Retries until the condition estimate is below max_cond.
  ShiftNodes nodes(const FrequencySet& fs, Parity parity, double max_cond = 1e6,
                   bool pin_zero = false) {
    const auto n = static_cast<Eigen::Index>(
        parity == Parity::odd ? fs.size() : fs.size() + 1);
    for (;;) {
      ShiftNodes s{parity, Eigen::VectorXd(n)};
      for (Eigen::Index i = 0; i < n; ++i) s.values[i] = uniform(0.05, kPi - 0.05);
      if (pin_zero && parity == Parity::even) s.values[0] = 0.0;
      if (diagnose(interpolation_matrix(s, fs)).condition_estimate < max_cond)
        return s;
    }
  }

  /// Nodes where every coefficient is bounded away from zero, so F_wgt is
  /// differentiable in a neighbourhood.
  ShiftNodes smooth_nodes(const FrequencySet& fs, int order, double margin = 1e-2) {
    for (;;) {
      ShiftNodes s = nodes(fs, parity_of(order), 1e4);
      const Eigen::VectorXd b = solve_coefficients(s, fs, order).b;
      if (b.cwiseAbs().minCoeff() > margin) return s;
    }
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// Frequency sets exercised across the suite.
inline std::vector<FrequencySet> sample_sets() {
  return {FrequencySet({1.0}), FrequencySet({1.0, 2.0}),
          FrequencySet({1.0, 2.0, 3.0, 4.0}), FrequencySet({1.0, 2.0, 4.0}),
          FrequencySet({0.7, 1.9, 3.2})};
}

// Central differences of an objective in each coordinate; accuracy 2 is the
// plain two-point stencil.
template <typename F>
Eigen::VectorXd fd_gradient(F&& objective, const ShiftNodes& nodes, double h,
                            int accuracy = 2) {
  Eigen::VectorXd g(nodes.size());
  for (Eigen::Index i = 0; i < nodes.size(); ++i) {
    auto along = [&](double x) {
      ShiftNodes moved = nodes;
      moved.values[i] = x;
      return objective(moved);
    };
    g[i] = central_difference(along, nodes.values[i], 1, h, accuracy);
  }
  return g;
}

inline double rel_err(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

}  // namespace epsr::testing
