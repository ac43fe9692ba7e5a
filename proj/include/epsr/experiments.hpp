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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "epsr/epsr.hpp"
#include "epsr/qsim.hpp"
#include "epsr/variance.hpp"

namespace epsr {

/// Seed used for theta_bar when a config does not list one.
inline constexpr std::uint64_t kDefaultThetaSeed = 7;

struct ExperimentConfig {
  std::string experiment;  // result1 | result2 | result3 | landscape | de-sweep
  int q = 5;
  int p = 2;
  double delta = 0.5;
  std::uint64_t seed = 1;
  long n_total = 1000;
  int repetitions = 500;
  std::vector<std::size_t> params;  // empty selects the experiment default
  std::vector<int> orders;          // empty selects the experiment default
  Scheme scheme = Scheme::weighted;
  std::string output = "out";
  qsim::NoiseModel noise = qsim::NoiseModel::multinomial;
  std::optional<std::vector<double>> theta_bar;
  std::uint64_t theta_seed = kDefaultThetaSeed;
  int max_r = 8;  // de-sweep bounds
  int max_d = 8;
  int generations = 300;
  double fd_step = 1e-2;
  bool reproducible = false;
  bool emit_gnuplot = false;
};

void validate(const ExperimentConfig& config);
ExperimentConfig config_from_json(std::string_view text);
std::string config_to_json(const ExperimentConfig& config);

/// Uniform draw from [0, 2 pi)^m.
Eigen::VectorXd random_theta(std::size_t m, std::uint64_t seed);
Eigen::VectorXd theta_bar_of(const ExperimentConfig& config);

qsim::CostSlice make_xxz_slice(int q, int p, double delta,
                               const Eigen::VectorXd& theta_bar,
                               std::size_t index);

/// Deterministic child seed from a master seed and a path of indices.
std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> path);

/// Rule for a slice's frequency set: the scaled equidistant rule when the set
/// is equidistant, otherwise weighted-optimal nodes from a seeded DE run.
PsrRule default_rule(const FrequencySet& fs, int order);

/// One derivative estimate at the slice's base point. Terms with zero shots
/// are skipped; in exact mode shot counts are ignored.
double estimate_derivative(const qsim::CostSlice& slice,
                           const ExpandedRule& rule,
                           const std::vector<long>& shots,
                           qsim::NoiseModel noise, std::uint64_t seed);

/// `repetitions` independent estimates under the scheme's rounded
/// allocation. Repetitions run concurrently; the output is in index order.
std::vector<double> repeat_estimates(const qsim::CostSlice& slice,
                                     const ExpandedRule& rule, Scheme scheme,
                                     long n_total, int repetitions,
                                     qsim::NoiseModel noise,
                                     std::uint64_t seed);

double sample_mean(const std::vector<double>& xs);
/// Unbiased (n - 1) sample variance.
double sample_variance(const std::vector<double>& xs);

/// Mean one-shot variance over the rule's evaluation points.
double mean_shot_variance(const qsim::CostSlice& slice, const ExpandedRule& rule);

struct Result1Row {
  std::size_t param = 0;
  int order = 1;
  std::vector<double> frequencies;
  double epsr = 0.0;
  double reference = 0.0;
  double abs_error = 0.0;
};

/// EPSR against 8th-order central differences on exact slices.
std::vector<Result1Row> result1_errors(const ExperimentConfig& config);

struct ComparisonSummary {
  std::size_t param = 0;
  std::vector<std::string> labels;
  std::vector<double> predicted;         // scaled units
  std::vector<double> sample_variance;   // raw
  std::vector<double> scaled_variance;   // sample variance * N_total / mean sigma^2
  std::vector<std::vector<double>> estimates;
  double exact = 0.0;
};

/// Uniform vs weighted allocation with the equidistant d = 1 rule.
ComparisonSummary result2_compare(const ExperimentConfig& config,
                                  std::size_t param);

/// Two random node sets drawn for parameter `param` under `seed`.
std::vector<ShiftNodes> random_node_sets(const FrequencySet& fs, int order,
                                         std::uint64_t seed, std::size_t count);

/// Equidistant vs two random node sets, weighted allocation.
ComparisonSummary result3_compare(const ExperimentConfig& config,
                                  std::size_t param);

struct SweepRow {
  int r = 1;
  int d = 1;
  double max_error = 0.0;
  double objective = 0.0;
  double expected = 0.0;
};

std::vector<SweepRow> de_sweep(const ExperimentConfig& config);

/// Runs one experiment and returns the paths written.
std::vector<std::string> run_experiment(const ExperimentConfig& config);

}  // namespace epsr
