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

#include "epsr/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "epsr/parallel.hpp"

namespace epsr {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Optimisation runs over the free coordinates only; even rules pin x_0 = 0.
struct NodeBox {
  Parity parity;
  Eigen::Index dim;
  double lower;
  double upper;

  NodeBox(Parity p, std::size_t r, double eps)
      : parity(p),
        dim(static_cast<Eigen::Index>(r)),
        lower(eps),
        upper(p == Parity::odd ? kPi - eps : kPi) {}

  ShiftNodes assemble(const Eigen::VectorXd& free) const {
    if (parity == Parity::odd) return {parity, free};
    Eigen::VectorXd all(dim + 1);
    all[0] = 0.0;
    all.tail(dim) = free;
    return {parity, all};
  }

  Eigen::VectorXd free_part(const ShiftNodes& nodes) const {
    return parity == Parity::odd ? nodes.values
                                 : Eigen::VectorXd(nodes.values.tail(dim));
  }

  Eigen::VectorXd project(Eigen::VectorXd x) const {
    for (Eigen::Index i = 0; i < x.size(); ++i)
      x[i] = std::clamp(x[i], lower, upper);
    return x;
  }
};

Eigen::VectorXd sorted(Eigen::VectorXd x) {
  std::sort(x.data(), x.data() + x.size());
  return x;
}

Eigen::VectorXd descent_direction(Scheme scheme, const ShiftNodes& nodes,
                                  const FrequencySet& fs, int order,
                                  const NodeBox& box) {
  const Eigen::VectorXd g =
      scheme == Scheme::uniform
          ? uniform_objective_gradient(nodes, fs, order)
          : weighted_objective_subgradient(nodes, fs, order);
  return box.free_part({nodes.parity, g});
}

void check_dimensions(const FrequencySet& fs, int order,
                      const ShiftNodes& start) {
  const Parity parity = parity_of(order);
  if (start.parity != parity)
    fail(ErrorKind::validation, "start nodes do not match the order parity");
  const auto expected = static_cast<Eigen::Index>(
      parity == Parity::odd ? fs.size() : fs.size() + 1);
  if (start.size() != expected)
    fail(ErrorKind::validation, "start node count does not match r");
}

}  // namespace

std::string trace_to_json_line(const TraceRecord& record) {
  nlohmann::ordered_json j;
  j["iter"] = record.iteration;
  j["objective"] = record.objective;
  j["nodes"] = std::vector<double>(record.nodes.data(),
                                   record.nodes.data() + record.nodes.size());
  return j.dump();
}

double shift_objective(Scheme scheme, const ShiftNodes& nodes,
                       const FrequencySet& fs, int order) {
  try {
    return scheme == Scheme::uniform ? uniform_objective(nodes, fs, order)
                                     : weighted_objective(nodes, fs, order);
  } catch (const SingularNodesError&) {
    return kInf;
  }
}

OptimizeResult optimize_shifts_local(const FrequencySet& fs, int order,
                                     const ShiftNodes& start,
                                     const LocalOptions& options) {
  check_dimensions(fs, order, start);
  if (options.scheme == Scheme::custom)
    fail(ErrorKind::validation, "custom scheme has no shift objective");
  const NodeBox box(start.parity, fs.size(), options.box_eps);

  Eigen::VectorXd x = sorted(box.project(box.free_part(start)));
  double fx = shift_objective(options.scheme, box.assemble(x), fs, order);
  if (!std::isfinite(fx)) {
    // Surface the diagnostics of the offending start.
    solve_coefficients(box.assemble(x), fs, order);
    fail(ErrorKind::numerical, "start nodes are singular");
  }

  OptimizeResult result{box.assemble(x), fx, 0, false, std::nullopt};
  double step = options.step_size;
  int stalled = 0;
  for (int t = 1; t <= options.max_iters; ++t) {
    result.iterations = t;
    const Eigen::VectorXd g =
        descent_direction(options.scheme, box.assemble(x), fs, order, box);
    Eigen::VectorXd projected = g;
    for (Eigen::Index i = 0; i < x.size(); ++i)
      if ((x[i] <= box.lower && g[i] > 0.0) || (x[i] >= box.upper && g[i] < 0.0))
        projected[i] = 0.0;
    const double pg_norm = projected.lpNorm<Eigen::Infinity>();
    if (pg_norm <= options.gradient_tol) {
      result.converged = true;
      break;
    }

    bool moved = false;
    if (options.step_rule == StepRule::armijo) {
      for (double a = std::min(2.0 * step, 1.0); a > 1e-18; a *= 0.5) {
        const Eigen::VectorXd cand = box.project(x - a * g);
        const double fc =
            shift_objective(options.scheme, box.assemble(cand), fs, order);
        if (fc <= fx - 1e-4 * g.dot(x - cand)) {
          x = sorted(cand);
          fx = fc;
          step = a;
          moved = true;
          break;
        }
      }
      if (!moved) {
        // No sufficient decrease at any step length. The smooth case is a
        // numerical stationary point; the weighted case may sit on a kink,
        // where a short normalised subgradient step can still make progress.
        if (options.scheme == Scheme::weighted && stalled < 50) {
          ++stalled;
          const double a = options.step_size / std::sqrt(static_cast<double>(t));
          const Eigen::VectorXd cand =
              box.project(x - a * g / std::max(1.0, g.norm()));
          const double fc =
              shift_objective(options.scheme, box.assemble(cand), fs, order);
          if (std::isfinite(fc)) {
            x = sorted(cand);
            fx = fc;
          }
        } else {
          result.converged = pg_norm <= 1e-6 * (1.0 + std::abs(result.objective));
          break;
        }
      }
    } else {
      const double a = options.step_size / std::sqrt(static_cast<double>(t));
      const Eigen::VectorXd cand =
          box.project(x - a * g / std::max(1.0, g.norm()));
      const double fc =
          shift_objective(options.scheme, box.assemble(cand), fs, order);
      if (std::isfinite(fc)) {
        x = sorted(cand);
        fx = fc;
      }
    }

    if (fx < result.objective) {
      result.objective = fx;
      result.nodes = box.assemble(x);
    }
    if (options.trace) options.trace({t, fx, box.assemble(x).values});
  }
  return result;
}

OptimizeResult optimize_shifts_global(const FrequencySet& fs, int order,
                                      const GlobalOptions& options) {
  if (options.scheme == Scheme::custom)
    fail(ErrorKind::validation, "custom scheme has no shift objective");
  const Parity parity = parity_of(order);
  const NodeBox box(parity, fs.size(), options.box_eps);
  const auto dim = static_cast<std::size_t>(box.dim);
  const std::size_t np = options.population ? options.population : 15 * dim;
  if (np < 4 * dim || np < 4)
    fail(ErrorKind::validation,
         fmt::format("population {} is below 4 * dimension", np));

  auto score = [&](const Eigen::VectorXd& x) {
    return shift_objective(options.scheme, box.assemble(x), fs, order);
  };

  std::vector<Eigen::VectorXd> population(np);
  std::vector<double> fitness(np);
  {
    std::seed_seq init_seed{options.seed, std::uint64_t{0xDE}};
    std::mt19937_64 rng(init_seed);
    std::uniform_real_distribution<double> coord(box.lower, box.upper);
    for (auto& member : population) {
      member.resize(box.dim);
      for (Eigen::Index j = 0; j < box.dim; ++j) member[j] = coord(rng);
    }
  }
  parallel_for(np, [&](std::size_t i) { fitness[i] = score(population[i]); });

  std::vector<Eigen::VectorXd> trials(np);
  std::vector<double> trial_fitness(np);
  for (int gen = 1; gen <= options.generations; ++gen) {
    // Each member draws from its own stream so results do not depend on
    // the evaluation schedule.
    parallel_for(np, [&](std::size_t i) {
      std::seed_seq member_seed{options.seed, static_cast<std::uint64_t>(gen),
                                static_cast<std::uint64_t>(i)};
      std::mt19937_64 rng(member_seed);
      std::uniform_int_distribution<std::size_t> pick(0, np - 1);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      std::uniform_real_distribution<double> coord(box.lower, box.upper);
      std::size_t r1, r2, r3;
      do r1 = pick(rng); while (r1 == i);
      do r2 = pick(rng); while (r2 == i || r2 == r1);
      do r3 = pick(rng); while (r3 == i || r3 == r1 || r3 == r2);
      const auto jrand = static_cast<Eigen::Index>(
          std::uniform_int_distribution<std::size_t>(0, dim - 1)(rng));

      Eigen::VectorXd trial = population[i];
      for (Eigen::Index j = 0; j < box.dim; ++j) {
        if (j == jrand || unit(rng) < options.crossover_rate) {
          double v = population[r1][j] +
                     options.differential_weight *
                         (population[r2][j] - population[r3][j]);
          if (v < box.lower || v > box.upper) v = coord(rng);
          trial[j] = v;
        }
      }
      trial_fitness[i] = score(trial);
      trials[i] = std::move(trial);
    });
    for (std::size_t i = 0; i < np; ++i) {
      if (trial_fitness[i] <= fitness[i]) {
        population[i] = std::move(trials[i]);
        fitness[i] = trial_fitness[i];
      }
    }
  }

  const auto best = static_cast<std::size_t>(
      std::min_element(fitness.begin(), fitness.end()) - fitness.begin());
  const auto worst = *std::max_element(fitness.begin(), fitness.end());
  OptimizeResult result;
  result.nodes = box.assemble(sorted(population[best]));
  result.objective = fitness[best];
  result.iterations = options.generations;
  result.converged = std::isfinite(fitness[best]) &&
                     worst - fitness[best] <= 1e-10 * (1.0 + fitness[best]);

  if (options.polish && std::isfinite(result.objective)) {
    LocalOptions local;
    local.scheme = options.scheme;
    local.box_eps = options.box_eps;
    local.trace = options.trace;
    const OptimizeResult polished =
        optimize_shifts_local(fs, order, result.nodes, local);
    if (polished.objective <= result.objective) {
      result.nodes = polished.nodes;
      result.objective = polished.objective;
      result.converged = result.converged || polished.converged;
    }
  }

  if (options.scheme == Scheme::weighted && fs.is_integer()) {
    const ShiftNodes equi = equidistant_nodes(fs.size(), parity);
    if (max_node_error(result.nodes, equi) <= 1e-3 &&
        certify_equidistant_optimality(fs.size(), order).certified)
      result.certificate = "global-equidistant";
  }
  return result;
}

ShiftNodes canonicalize(const ShiftNodes& nodes) {
  ShiftNodes out = nodes;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    double x = std::fmod(out.values[i], 2.0 * kPi);
    if (x < 0.0) x += 2.0 * kPi;
    if (x > kPi) x = 2.0 * kPi - x;
    out.values[i] = x;
  }
  out.values = sorted(out.values);
  return out;
}

double max_node_error(const ShiftNodes& a, const ShiftNodes& b) {
  if (a.size() != b.size() || a.parity != b.parity)
    fail(ErrorKind::validation, "node sets are not comparable");
  return (canonicalize(a).values - canonicalize(b).values)
      .cwiseAbs()
      .maxCoeff();
}

}  // namespace epsr
