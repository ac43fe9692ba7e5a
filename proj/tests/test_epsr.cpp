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

#include <cmath>

#include "epsr/epsr.hpp"
#include "epsr/interpolation.hpp"
#include "epsr/trigpoly.hpp"
#include "support.hpp"

namespace epsr {
namespace {

using ::epsr::testing::Gen;
using ::epsr::testing::kPi;

ShiftNodes odd(std::initializer_list<double> v) {
  return {Parity::odd, Eigen::Map<const Eigen::VectorXd>(v.begin(), v.size())};
}
ShiftNodes even(std::initializer_list<double> v) {
  return {Parity::even, Eigen::Map<const Eigen::VectorXd>(v.begin(), v.size())};
}

TEST(InterpolationMatrix, OddExamples) {
  EXPECT_NEAR(interpolation_matrix(odd({kPi / 2}), FrequencySet({1}))(0, 0), 1.0, 1e-15);
  const Eigen::MatrixXd a =
      interpolation_matrix(odd({kPi / 4, 3 * kPi / 4}), FrequencySet({1, 2}));
  Eigen::Matrix2d ref;
  ref << std::sqrt(0.5), 1, std::sqrt(0.5), -1;
  EXPECT_LT((a - ref).cwiseAbs().maxCoeff(), 1e-15);
  const Eigen::MatrixXd z = interpolation_matrix(odd({0.0, 1.0}), FrequencySet({1, 2}));
  EXPECT_EQ(z.row(0).cwiseAbs().maxCoeff(), 0.0);
}

TEST(InterpolationMatrix, EvenExamples) {
  Eigen::Matrix2d r1;
  r1 << 1, 1, 1, -1;
  EXPECT_LT((interpolation_matrix(even({0, kPi}), FrequencySet({1})) - r1)
                .cwiseAbs().maxCoeff(), 1e-15);
  Eigen::Matrix3d r2;
  r2 << 1, 1, 1, 1, 0, -1, 1, -1, 1;
  EXPECT_LT((interpolation_matrix(even({0, kPi / 2, kPi}), FrequencySet({1, 2})) - r2)
                .cwiseAbs().maxCoeff(), 1e-15);
  const Eigen::MatrixXd dup =
      interpolation_matrix(even({0.3, -0.3, 1.0}), FrequencySet({1, 2}));
  EXPECT_LT((dup.row(0) - dup.row(1)).norm(), 1e-15);
}

TEST(InterpolationMatrix, LengthMismatchRejected) {
  EXPECT_THROW(interpolation_matrix(odd({0.1, 0.2}), FrequencySet({1})), Error);
  EXPECT_THROW(interpolation_matrix(even({0.1}), FrequencySet({1})), Error);
}

TEST(RhsVector, Examples) {
  EXPECT_EQ(rhs_vector(1, FrequencySet({1, 2}), Parity::odd), Eigen::Vector2d(1, 2));
  EXPECT_EQ(rhs_vector(2, FrequencySet({1, 2}), Parity::even),
            Eigen::Vector3d(0, -1, -4));
  EXPECT_EQ(rhs_vector(0, FrequencySet({1}), Parity::even), Eigen::Vector2d(1, 1));
  EXPECT_EQ(rhs_vector(3, FrequencySet({2}), Parity::odd), Eigen::VectorXd::Constant(1, -8));
  EXPECT_THROW(rhs_vector(2, FrequencySet({1}), Parity::odd), Error);
  EXPECT_THROW(rhs_vector(1, FrequencySet({1}), Parity::even), Error);
}

TEST(SolveCoefficients, Examples) {
  for (double x : {0.3, 1.0, 2.5}) {
    const auto c = solve_coefficients(odd({x}), FrequencySet({1}), 1);
    EXPECT_NEAR(c.b[0], 1.0 / std::sin(x), 1e-14);
    EXPECT_TRUE(c.diagnostics.nonsingular);
  }
  const auto c = solve_coefficients(odd({kPi / 4, 3 * kPi / 4}), FrequencySet({1, 2}), 1);
  EXPECT_NEAR(c.b[0], (1 + std::sqrt(2.0)) / std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(c.b[1], (1 - std::sqrt(2.0)) / std::sqrt(2.0), 1e-14);
}

TEST(SolveCoefficients, SingularNodesCarryDiagnostics) {
  try {
    solve_coefficients(odd({kPi}), FrequencySet({1}), 1);
    FAIL() << "expected a singular-node error";
  } catch (const SingularNodesError& e) {
    EXPECT_FALSE(e.diagnostics().nonsingular);
    EXPECT_EQ(e.kind(), ErrorKind::numerical);
  }
  EXPECT_THROW(solve_coefficients(odd({0.0, 1.0}), FrequencySet({1, 2}), 1),
               SingularNodesError);
  EXPECT_THROW(solve_coefficients(odd({0.5}), FrequencySet({1}), 2), Error);
}

TEST(EquidistantNodes, Examples) {
  EXPECT_LT((equidistant_nodes(2, Parity::odd).values -
             Eigen::Vector2d(kPi / 4, 3 * kPi / 4)).norm(), 1e-15);
  EXPECT_LT((equidistant_nodes(2, Parity::even).values -
             Eigen::Vector3d(0, kPi / 2, kPi)).norm(), 1e-15);
  EXPECT_NEAR(equidistant_nodes(1, Parity::odd).values[0], kPi / 2, 1e-15);
}

TEST(ClosedForm, Examples) {
  const ExpandedRule d1 = equidistant_closed_form(2, 1);
  ASSERT_EQ(d1.size(), 4);
  EXPECT_NEAR(d1.weights[0], 1.0 / (8 * std::pow(std::sin(kPi / 8), 2)), 1e-15);
  EXPECT_NEAR(d1.weights[0], 0.8535534, 1e-7);
  EXPECT_NEAR(d1.weights[1], -0.1464466, 1e-7);
  EXPECT_NEAR(d1.weights[2], 0.1464466, 1e-7);
  EXPECT_NEAR(d1.weights[3], -0.8535534, 1e-7);

  const ExpandedRule d2 = equidistant_closed_form(2, 2);
  EXPECT_EQ(d2.shifts[0], 0.0);
  EXPECT_DOUBLE_EQ(d2.weights[0], -1.5);

  const ExpandedRule r1 = equidistant_closed_form(1, 1);
  EXPECT_NEAR(r1.weights[0], 0.5, 1e-15);
  EXPECT_NEAR(r1.shifts[0], kPi / 2, 1e-15);
  EXPECT_THROW(equidistant_closed_form(2, 3), Error);
}

TEST(ClosedForm, MatchesLinearSolveForAllR) {
  for (std::size_t r = 1; r <= 8; ++r) {
    for (int d : {1, 2}) {
      const ExpandedRule closed = equidistant_closed_form(r, d);
      const ExpandedRule solved = canonical_periodic(
          make_equidistant_rule(FrequencySet::integers(r), d).expanded);
      ASSERT_EQ(closed.size(), solved.size()) << "r=" << r << " d=" << d;
      EXPECT_LT((closed.shifts - solved.shifts).cwiseAbs().maxCoeff(), 1e-10);
      EXPECT_LT((closed.weights - solved.weights).cwiseAbs().maxCoeff(), 1e-10);
    }
  }
}

TEST(Determinant, Examples) {
  const FrequencySet fs({1, 2});
  EXPECT_NEAR(determinant_closed_form(odd({kPi / 4, 3 * kPi / 4}), fs), -std::sqrt(2.0),
              1e-14);
  EXPECT_NEAR(interpolation_matrix(odd({kPi / 4, 3 * kPi / 4}), fs).determinant(),
              -std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(determinant_closed_form(odd({0.4, kPi}), fs), 0.0, 1e-15);
  EXPECT_NEAR(determinant_closed_form(even({0.0, 0.7, -0.7}), fs), 0.0, 1e-15);
  EXPECT_THROW(determinant_closed_form(odd({0.4}), FrequencySet({1.5})), Error);
}

// Numeric determinant in long double; the double LU loses up to ~1e-9
// relative accuracy on the worse-conditioned node sets.
long double reference_determinant(const ShiftNodes& n, const FrequencySet& fs) {
  const Eigen::Matrix<long double, Eigen::Dynamic, 1> x = n.values.cast<long double>();
  return n.parity == Parity::odd ? build_A_odd(x, fs).determinant()
                                 : build_A_even(x, fs).determinant();
}

TEST(Determinant, ClosedFormMatchesNumeric) {
  Gen gen(41);
  for (int t = 0; t < 100; ++t) {
    const auto r = static_cast<std::size_t>(gen.integer(1, 6));
    const FrequencySet fs = FrequencySet::integers(r);
    for (Parity p : {Parity::odd, Parity::even}) {
      const ShiftNodes nodes = gen.nodes(fs, p, 1e12);
      const double closed = determinant_closed_form(nodes, fs);
      const long double numeric = reference_determinant(nodes, fs);
      EXPECT_LE(std::abs(closed - numeric), 1e-9 * std::abs(numeric));
    }
  }
}

// For integer frequencies the matrix is singular exactly when a node sits in
// pi Z (odd only) or two nodes agree up to sign modulo 2 pi.
TEST(Determinant, VanishesExactlyOnViolations) {
  const FrequencySet fs({1, 2});
  const FrequencySet fs3({1, 2, 3});
  auto congruent = [](double a, double b) {
    auto near_2pi_multiple = [](double v) {
      return std::abs(v / (2 * kPi) - std::round(v / (2 * kPi))) < 1e-9;
    };
    return near_2pi_multiple(a - b) || near_2pi_multiple(a + b);
  };
  auto in_pi_z = [](double v) { return std::abs(v / kPi - std::round(v / kPi)) < 1e-9; };
  for (int i = -4; i <= 8; ++i) {
    for (int j = -4; j <= 8; ++j) {
      const double a = i * kPi / 4, b = j * kPi / 4;
      const bool violates = in_pi_z(a) || in_pi_z(b) || congruent(a, b);
      const double det = determinant_closed_form(odd({a, b}), fs);
      EXPECT_EQ(std::abs(det) < 1e-12, violates) << a << ' ' << b;
      const bool even_violates = congruent(0.0, a) || congruent(0.0, b) ||
                                 congruent(a, b);
      const double det_e = determinant_closed_form(even({0.0, a, b}), fs);
      EXPECT_EQ(std::abs(det_e) < 1e-12, even_violates) << a << ' ' << b;
    }
  }
  EXPECT_NEAR(determinant_closed_form(odd({0.3, 2 * kPi - 0.3, 1.0}), fs3), 0.0, 1e-12);
}

TEST(EquidistantNodes, GramMatrix) {
  for (std::size_t r = 1; r <= 8; ++r) {
    const Eigen::MatrixXd a =
        interpolation_matrix(equidistant_nodes(r, Parity::odd), FrequencySet::integers(r));
    Eigen::VectorXd diag = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(r), 0.5);
    diag[static_cast<Eigen::Index>(r) - 1] = 1.0;
    const Eigen::MatrixXd d = static_cast<double>(r) * diag.asDiagonal().toDenseMatrix();
    EXPECT_LT((a.transpose() * a - d).cwiseAbs().maxCoeff(), 1e-10) << r;
  }
}

TEST(ApplyRule, Examples) {
  const TrigPolyd cosine = make_trigpoly<double>(
      FrequencySet({1}), 0.0, Eigen::VectorXd::Ones(1), Eigen::VectorXd::Zero(1));
  const PsrRule rule = make_rule(odd({kPi / 2}), FrequencySet({1}), 1);
  auto f = [&](double x) { return evaluate(cosine, x); };
  EXPECT_NEAR(apply_rule(rule, f, 0.0), 0.0, 1e-15);
  EXPECT_NEAR(apply_rule(rule, f, kPi / 3), -std::sin(kPi / 3), 1e-15);
}

// Exactness over every sample set, random nodes and orders 1..6.
TEST(ApplyRule, ExactOnRandomPolynomials) {
  Gen gen(53);
  for (const FrequencySet& fs : testing::sample_sets()) {
    for (int d = 1; d <= 6; ++d) {
      for (int t = 0; t < 8; ++t) {
        const TrigPolyd p = random_trigpoly(fs, gen.seed());
        const PsrRule rule =
            make_rule(gen.nodes(fs, parity_of(d), 1e6, t % 2 == 0), fs, d);
        auto f = [&](double x) { return evaluate(p, x); };
        for (double xbar : {0.0, 0.3, -1.1}) {
          const double exact = exact_derivative(p, d, xbar);
          EXPECT_NEAR(apply_rule(rule, f, xbar), exact, 1e-8 * (1 + std::abs(exact)))
              << "d=" << d << " fs size " << fs.size();
        }
      }
    }
  }
}

TEST(ApplyRule, EvenOrderZeroReconstructsValue) {
  const FrequencySet fs({1, 2, 4});
  const TrigPolyd p = random_trigpoly(fs, 9);
  Gen gen(9);
  const PsrRule rule = make_rule(gen.nodes(fs, Parity::even), fs, 0);
  auto f = [&](double x) { return evaluate(p, x); };
  EXPECT_NEAR(apply_rule(rule, f, 0.4), evaluate(p, 0.4), 1e-10);
}

TEST(ApplyRule, NodeIndependence) {
  Gen gen(59);
  const FrequencySet fs({1, 2, 4});
  for (int d = 1; d <= 4; ++d) {
    const TrigPolyd p = random_trigpoly(fs, gen.seed());
    auto f = [&](double x) { return evaluate(p, x); };
    const PsrRule a = make_rule(gen.nodes(fs, parity_of(d)), fs, d);
    const PsrRule b = make_rule(gen.nodes(fs, parity_of(d)), fs, d);
    EXPECT_NEAR(apply_rule(a, f, 0.2), apply_rule(b, f, 0.2), 1e-8);
  }
}

TEST(ApplyRule, OddOrdersShareShifts) {
  const FrequencySet fs({1, 2, 3});
  const ShiftNodes nodes = equidistant_nodes(3, Parity::odd);
  const PsrRule d1 = make_rule(nodes, fs, 1);
  const PsrRule d3 = make_rule(nodes, fs, 3);
  EXPECT_EQ(d1.expanded.shifts, d3.expanded.shifts);
  EXPECT_GT((d1.expanded.weights - d3.expanded.weights).norm(), 1.0);
}

TEST(ExpandedRule, StructureMatchesParity) {
  const FrequencySet fs({1, 2, 4});
  Gen gen(61);
  const PsrRule o = make_rule(gen.nodes(fs, Parity::odd), fs, 1);
  ASSERT_EQ(o.expanded.size(), 6);
  for (Eigen::Index i = 0; i < 3; ++i) {
    EXPECT_EQ(o.expanded.shifts[i + 3], -o.expanded.shifts[i]);
    EXPECT_EQ(o.expanded.weights[i], 0.5 * o.coeffs[i]);
    EXPECT_EQ(o.expanded.weights[i + 3], -0.5 * o.coeffs[i]);
  }
  const PsrRule e = make_rule(gen.nodes(fs, Parity::even), fs, 2);
  ASSERT_EQ(e.expanded.size(), 8);
  for (Eigen::Index i = 0; i < 4; ++i)
    EXPECT_EQ(e.expanded.weights[i], e.expanded.weights[i + 4]);
}

TEST(EvaluationCount, Examples) {
  EXPECT_EQ(evaluation_count(make_equidistant_rule(FrequencySet::integers(3), 1)), 6u);
  EXPECT_EQ(evaluation_count(make_rule(even({0, kPi / 2, kPi}), FrequencySet({1, 2}), 2)),
            4u);
  EXPECT_EQ(evaluation_count(make_rule(even({0.2, 1.1, 2.3}), FrequencySet({1, 2}), 2)),
            6u);
  EXPECT_EQ(evaluation_count(make_rule(even({0.0, 1.1, 2.3}), FrequencySet({1, 2}), 2)),
            5u);
  // Merging at pi is limited to equidistant sets.
  EXPECT_EQ(evaluation_count(make_rule(even({0.0, 1.1, 2.3, kPi}), FrequencySet({1, 2, 4}), 2)),
            7u);
}

TEST(EvaluationCount, HalfPeriodMergeForScaledSets) {
  const FrequencySet fs({0.5, 1.0});
  const PsrRule rule = make_equidistant_rule(fs, 2);
  EXPECT_EQ(evaluation_count(rule), 4u);
  const TrigPolyd p = random_trigpoly(fs, 4);
  auto f = [&](double x) { return evaluate(p, x); };
  EXPECT_NEAR(apply_rule(rule, f, 0.9), exact_derivative(p, 2, 0.9), 1e-12);
}

TEST(RuleJson, RoundTrip) {
  const PsrRule rule = make_equidistant_rule(FrequencySet::integers(3), 2);
  const PsrRule back = rule_from_json(rule_to_json(rule));
  EXPECT_EQ(back.order, 2);
  EXPECT_EQ(back.parity, Parity::even);
  EXPECT_EQ(back.nodes.values, rule.nodes.values);
  EXPECT_LT((back.coeffs - rule.coeffs).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(back.expanded.shifts, rule.expanded.shifts);
}

TEST(RuleJson, MalformedOrInconsistentDocuments) {
  try {
    rule_from_json("{\"order\": 1");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::config);
  }
  std::string text = rule_to_json(make_equidistant_rule(FrequencySet({1, 2}), 1));
  const auto pos = text.find("1.7071067811865475");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 18, "1.8071067811865475");
  EXPECT_THROW(rule_from_json(text), Error);
}

}  // namespace
}  // namespace epsr
