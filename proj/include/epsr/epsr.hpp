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
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "epsr/error.hpp"
#include "epsr/interpolation.hpp"
#include "epsr/spectra.hpp"

namespace epsr {

enum class Parity { odd, even };

inline Parity parity_of(int order) {
  return order % 2 == 0 ? Parity::even : Parity::odd;
}

std::string_view to_string(Parity parity);
Parity parse_parity(std::string_view text);

/// Interpolation abscissae. Odd rules carry r nodes x_1..x_r, even rules
/// r+1 nodes x_0..x_r.
struct ShiftNodes {
  Parity parity = Parity::odd;
  Eigen::VectorXd values;

  Eigen::Index size() const { return values.size(); }
};

/// Conditioning of the node matrix. The condition estimate is the ratio of
/// extreme singular values.
struct RuleDiagnostics {
  double determinant = 0.0;
  double condition_estimate = 0.0;
  bool nonsingular = false;
};

/// Node sets whose matrix exceeds this condition estimate are rejected, as are
/// matrices whose smallest singular value is below 1 / kMaxCondition.
inline constexpr double kMaxCondition = 1e12;

/// Raised when a node set yields a singular or ill-conditioned system.
class SingularNodesError : public Error {
 public:
  SingularNodesError(const std::string& what, RuleDiagnostics diagnostics)
      : Error(ErrorKind::numerical, what), diagnostics_(diagnostics) {}

  const RuleDiagnostics& diagnostics() const noexcept { return diagnostics_; }

 private:
  RuleDiagnostics diagnostics_;
};

/// f^(d)(x) = sum_mu weights[mu] * f(x + shifts[mu]).
struct ExpandedRule {
  Eigen::VectorXd shifts;
  Eigen::VectorXd weights;

  Eigen::Index size() const { return shifts.size(); }
};

struct PsrRule {
  int order = 1;
  Parity parity = Parity::odd;
  ShiftNodes nodes;
  Eigen::VectorXd coeffs;  // b(x)
  ExpandedRule expanded;
  FrequencySet frequencies;
  RuleDiagnostics diagnostics;
};

/// A_o for odd nodes, A_e for even nodes.
Eigen::MatrixXd interpolation_matrix(const ShiftNodes& nodes,
                                     const FrequencySet& fs);

/// p^(d) (odd) or q^(d) (even, with the Kronecker-delta leading entry).
Eigen::VectorXd rhs_vector(int order, const FrequencySet& fs, Parity parity);

RuleDiagnostics diagnose(const Eigen::MatrixXd& a);

struct Coefficients {
  Eigen::VectorXd b;
  RuleDiagnostics diagnostics;
};

/// Solves A(x)^T b = rhs with a fully pivoted LU. Throws SingularNodesError
/// when the condition estimate exceeds kMaxCondition.
Coefficients solve_coefficients(const ShiftNodes& nodes, const FrequencySet& fs,
                                int order);

/// pi/(2r) + (i-1) pi/r for odd parity, i pi/r (i = 0..r) for even parity.
ShiftNodes equidistant_nodes(std::size_t r, Parity parity);

/// Expands b into (shift, weight) pairs. Even rules fold the x = 0 node into
/// a single evaluation; when the set is equidistant with step W the node
/// x = pi/W is folded too, since f(x + pi/W) = f(x - pi/W) there.
ExpandedRule expand_rule(const ShiftNodes& nodes, const Eigen::VectorXd& b,
                         const FrequencySet& fs);

PsrRule make_rule(const ShiftNodes& nodes, const FrequencySet& fs, int order);

/// Equidistant nodes for an equidistant set, scaled by its step.
PsrRule make_equidistant_rule(const FrequencySet& fs, int order);

/// Closed-form equidistant rule over {1..r} for d in {1, 2}. Shifts lie in
/// [0, 2 pi) and are listed in ascending order.
ExpandedRule equidistant_closed_form(std::size_t r, int order);

/// Chebyshev factorisation of det A_o / det A_e for integer frequencies.
double determinant_closed_form(const ShiftNodes& nodes, const FrequencySet& fs);

/// Distinct evaluator calls needed by the rule.
inline std::size_t evaluation_count(const PsrRule& rule) {
  return static_cast<std::size_t>(rule.expanded.size());
}

template <typename Evaluator>
double apply_rule(const ExpandedRule& rule, Evaluator&& evaluator,
                  double xbar) {
  double value = 0.0;
  for (Eigen::Index mu = 0; mu < rule.size(); ++mu)
    value += rule.weights[mu] * evaluator(xbar + rule.shifts[mu]);
  return value;
}

template <typename Evaluator>
double apply_rule(const PsrRule& rule, Evaluator&& evaluator, double xbar) {
  return apply_rule(rule.expanded, std::forward<Evaluator>(evaluator), xbar);
}

/// Shifts folded into [0, 2 pi) and sorted, weights permuted alongside.
ExpandedRule canonical_periodic(const ExpandedRule& rule);

std::string rule_to_json(const PsrRule& rule);
PsrRule rule_from_json(std::string_view text);

}  // namespace epsr
