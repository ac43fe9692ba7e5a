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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "epsr/experiments.hpp"
#include "support.hpp"

namespace epsr {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("epsr_test_" + name);
  fs::remove_all(dir);
  return dir;
}

TEST(Config, JsonRoundTrip) {
  ExperimentConfig c;
  c.experiment = "result2";
  c.params = {0, 1};
  c.repetitions = 20;
  c.scheme = Scheme::uniform;
  const ExperimentConfig back = config_from_json(config_to_json(c));
  EXPECT_EQ(back.experiment, "result2");
  EXPECT_EQ(back.params, c.params);
  EXPECT_EQ(back.repetitions, 20);
  EXPECT_EQ(back.scheme, Scheme::uniform);
  ASSERT_TRUE(back.theta_bar.has_value());
  EXPECT_EQ(Eigen::Map<const Eigen::VectorXd>(back.theta_bar->data(), 8),
            random_theta(8, kDefaultThetaSeed));
}

TEST(Config, Errors) {
  auto kind_of = [](const std::string& text) {
    try {
      config_from_json(text);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::numerical;
  };
  EXPECT_EQ(kind_of("{\"experiment\": \"result9\"}"), ErrorKind::config);
  EXPECT_EQ(kind_of("{\"experiment\": \"result1\", \"q\": 2}"), ErrorKind::config);
  EXPECT_EQ(kind_of("{\"experiment\": \"result1\", \"shots\": 5}"), ErrorKind::config);
  EXPECT_EQ(kind_of("{\"experiment\": \"result1\", \"params\": [8]}"), ErrorKind::config);
  EXPECT_EQ(kind_of("{\"experiment\": \"result1\", \"theta_bar\": [1, 2]}"), ErrorKind::config);
  EXPECT_EQ(kind_of("{\"experiment\": "), ErrorKind::config);
  EXPECT_EQ(kind_of("[]"), ErrorKind::config);
}

TEST(Seeds, DeriveSeedIsDeterministicAndPathSensitive) {
  EXPECT_EQ(derive_seed(1, {2, 3}), derive_seed(1, {2, 3}));
  EXPECT_NE(derive_seed(1, {2, 3}), derive_seed(1, {3, 2}));
  EXPECT_NE(derive_seed(1, {2}), derive_seed(2, {2}));
  EXPECT_NE(derive_seed(1, {2}), derive_seed(1, {2, 0}));
}

TEST(Statistics, MeanAndVariance) {
  EXPECT_DOUBLE_EQ(sample_mean({1, 2, 3, 4}), 2.5);
  EXPECT_DOUBLE_EQ(sample_variance({1, 2, 3, 4}), 5.0 / 3.0);
  EXPECT_THROW(sample_mean({}), Error);
  EXPECT_THROW(sample_variance({1.0}), Error);
}

TEST(RandomNodes, DeterministicAndValid) {
  const FrequencySet fs({1, 2, 3, 4});
  for (int d : {1, 2}) {
    const auto a = random_node_sets(fs, d, 5, 2);
    const auto b = random_node_sets(fs, d, 5, 2);
    ASSERT_EQ(a.size(), 2u);
    for (std::size_t k = 0; k < 2; ++k) {
      EXPECT_EQ(a[k].values, b[k].values);
      EXPECT_NO_THROW(solve_coefficients(a[k], fs, d));
      if (d == 2) EXPECT_EQ(a[k].values[0], 0.0);
      EXPECT_GT(a[k].values.minCoeff(), d == 2 ? -1e-300 : 0.0);
      EXPECT_LT(a[k].values.maxCoeff(), testing::kPi);
    }
  }
}

TEST(Estimation, ExactNoiseMatchesRule) {
  const auto slice = make_xxz_slice(5, 2, 0.5, random_theta(8, 7), 0);
  const PsrRule rule = default_rule(FrequencySet({1, 2}), 1);
  const std::vector<long> shots(static_cast<std::size_t>(rule.expanded.size()), 1);
  EXPECT_NEAR(estimate_derivative(slice, rule.expanded, shots, qsim::NoiseModel::exact, 0),
              apply_rule(rule, slice, slice.base_point()), 1e-15);
  EXPECT_THROW(estimate_derivative(slice, rule.expanded, {1}, qsim::NoiseModel::multinomial, 0),
               Error);
}

TEST(Estimation, RepetitionsAreReproducible) {
  const auto slice = make_xxz_slice(5, 2, 0.5, random_theta(8, 7), 1);
  const PsrRule rule = default_rule(slice_frequencies(slice), 1);
  const auto a = repeat_estimates(slice, rule.expanded, Scheme::weighted, 200, 16,
                                  qsim::NoiseModel::multinomial, 3);
  const auto b = repeat_estimates(slice, rule.expanded, Scheme::weighted, 200, 16,
                                  qsim::NoiseModel::multinomial, 3);
  EXPECT_EQ(a, b);
}

TEST(Result1, SmallRun) {
  ExperimentConfig c;
  c.experiment = "result1";
  c.params = {0, 7};
  const auto rows = result1_errors(c);
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& row : rows) EXPECT_LT(row.abs_error, 1e-9);
  EXPECT_EQ(rows[2].frequencies, (std::vector<double>{1, 2, 4}));
}

TEST(Result2, PredictionsAndColumns) {
  ExperimentConfig c;
  c.experiment = "result2";
  c.repetitions = 40;
  const ComparisonSummary s = result2_compare(c, 0);
  ASSERT_EQ(s.labels.size(), 2u);
  EXPECT_NEAR(s.predicted[0], 6.0, 1e-9);
  EXPECT_NEAR(s.predicted[1], 4.0, 1e-9);
  EXPECT_EQ(s.estimates[0].size(), 40u);
}

TEST(RunExperiment, ReproducibleOutputIsByteIdentical) {
  ExperimentConfig c;
  c.experiment = "result2";
  c.params = {0};
  c.repetitions = 30;
  c.reproducible = true;
  c.output = scratch("a").string();
  const auto first = run_experiment(c);
  c.output = scratch("b").string();
  const auto second = run_experiment(c);
  ASSERT_EQ(first.size(), second.size());
  for (std::size_t k = 0; k < first.size(); ++k) {
    if (fs::path(first[k]).extension() != ".csv") continue;
    EXPECT_EQ(slurp(first[k]), slurp(second[k])) << first[k];
  }
}

TEST(RunExperiment, TimestampHeaderUnlessReproducible) {
  ExperimentConfig c;
  c.experiment = "result1";
  c.params = {0};
  c.orders = {1};
  c.output = scratch("ts").string();
  run_experiment(c);
  const std::string text = slurp(fs::path(c.output) / "result1_errors.csv");
  EXPECT_EQ(text.rfind("#", 0), 0u);
  c.reproducible = true;
  run_experiment(c);
  EXPECT_NE(slurp(fs::path(c.output) / "result1_errors.csv").rfind("#", 0), 0u);
}

}  // namespace
}  // namespace epsr
