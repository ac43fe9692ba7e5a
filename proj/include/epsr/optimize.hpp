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

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "epsr/variance.hpp"

namespace epsr {

/// Half-width of the excluded band at the edges of the node box.
inline constexpr double kBoxEps = 1e-3;

enum class StepRule {
  armijo,       // backtracking on the (sub)gradient direction
  diminishing,  // c / sqrt(t), for the nonsmooth weighted objective
};

struct TraceRecord {
  int iteration = 0;
  double objective = 0.0;
  Eigen::VectorXd nodes;
};

struct LocalOptions {
  Scheme scheme = Scheme::weighted;
  StepRule step_rule = StepRule::armijo;
  double step_size = 0.1;  // initial Armijo step, or c for c / sqrt(t)
  int max_iters = 5000;
  double gradient_tol = 1e-10;
  double box_eps = kBoxEps;
  std::function<void(const TraceRecord&)> trace;
};

struct OptimizeResult {
  ShiftNodes nodes;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  std::optional<std::string> certificate;  // "global-equidistant"
};

/// {"iter": .., "objective": .., "nodes": [..]} on one line.
std::string trace_to_json_line(const TraceRecord& record);

/// Objective selected by the scheme (F_unif or F_wgt); +inf on singular nodes.
double shift_objective(Scheme scheme, const ShiftNodes& nodes,
                       const FrequencySet& fs, int order);

/// Projected (sub)gradient descent over the node box. Odd nodes live in
/// (eps, pi - eps); even rules pin x_0 = 0 and keep the rest in [eps, pi].
/// Iterates are re-sorted after every step. Returns the best iterate seen.
OptimizeResult optimize_shifts_local(const FrequencySet& fs, int order,
                                     const ShiftNodes& start,
                                     const LocalOptions& options = {});

struct GlobalOptions {
  Scheme scheme = Scheme::weighted;
  std::size_t population = 0;  // 0 selects 15 * dimension
  int generations = 300;
  double differential_weight = 0.8;
  double crossover_rate = 0.9;
  std::uint64_t seed = 0;
  double box_eps = kBoxEps;
  bool polish = false;  // finish with optimize_shifts_local from the best
  std::function<void(const TraceRecord&)> trace;  // forwarded to the polish
};

/// DE/rand/1/bin over the node box; singular candidates score +inf.
/// Deterministic for a given seed regardless of the worker count.
OptimizeResult optimize_shifts_global(const FrequencySet& fs, int order,
                                      const GlobalOptions& options = {});

/// Folds each node into [0, pi] using x -> -x and 2 pi periodicity, then
/// sorts. Both objectives are invariant under these maps for integer sets.
ShiftNodes canonicalize(const ShiftNodes& nodes);

/// max_i |a_i - b_i| after canonicalisation.
double max_node_error(const ShiftNodes& a, const ShiftNodes& b);

}  // namespace epsr
