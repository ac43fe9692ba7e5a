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

#include "epsr/epsr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

namespace epsr {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMergeTol = 1e-12;

// Distance of x from the lattice period * Z.
double lattice_distance(double x, double period) {
  const double m = std::remainder(x, period);
  return std::abs(m);
}

void check_parity(int order, Parity parity) {
  if (order < 0) fail(ErrorKind::validation, "derivative order must be >= 0");
  if (parity_of(order) != parity)
    fail(ErrorKind::validation,
         fmt::format("order {} does not match {} parity", order,
                     to_string(parity)));
  if (parity == Parity::odd && order == 0)
    fail(ErrorKind::validation, "odd rules need order >= 1");
}

}  // namespace

std::string_view to_string(Parity parity) {
  return parity == Parity::odd ? "odd" : "even";
}

Parity parse_parity(std::string_view text) {
  if (text == "odd") return Parity::odd;
  if (text == "even") return Parity::even;
  fail(ErrorKind::validation, fmt::format("unknown parity '{}'", text));
}

Eigen::MatrixXd interpolation_matrix(const ShiftNodes& nodes,
                                     const FrequencySet& fs) {
  return nodes.parity == Parity::odd ? build_A_odd(nodes.values, fs)
                                     : build_A_even(nodes.values, fs);
}

Eigen::VectorXd rhs_vector(int order, const FrequencySet& fs, Parity parity) {
  check_parity(order, parity);
  const auto r = static_cast<Eigen::Index>(fs.size());
  if (parity == Parity::odd) {
    const double sign = ((order - 1) / 2) % 2 == 0 ? 1.0 : -1.0;
    Eigen::VectorXd p(r);
    for (Eigen::Index k = 0; k < r; ++k)
      p[k] = sign * std::pow(fs[static_cast<std::size_t>(k)], order);
    return p;
  }
  const double sign = (order / 2) % 2 == 0 ? 1.0 : -1.0;
  Eigen::VectorXd q(r + 1);
  q[0] = sign * (order == 0 ? 1.0 : 0.0);
  for (Eigen::Index k = 0; k < r; ++k)
    q[k + 1] = sign * std::pow(fs[static_cast<std::size_t>(k)], order);
  return q;
}

RuleDiagnostics diagnose(const Eigen::MatrixXd& a) {
  RuleDiagnostics diag;
  diag.determinant = a.fullPivLu().determinant();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& sv = svd.singularValues();
  const double smallest = sv[sv.size() - 1];
  diag.condition_estimate = smallest > 0.0
                                ? sv[0] / smallest
                                : std::numeric_limits<double>::infinity();
  // Entries are sines and cosines, so unit scale is the natural reference
  // for "zero": a 1x1 [sin(pi)] has condition 1 yet is singular.
  diag.nonsingular = diag.determinant != 0.0 &&
                     std::isfinite(diag.condition_estimate) &&
                     diag.condition_estimate <= kMaxCondition &&
                     smallest * kMaxCondition > std::max(1.0, sv[0]);
  return diag;
}

Coefficients solve_coefficients(const ShiftNodes& nodes, const FrequencySet& fs,
                                int order) {
  check_parity(order, nodes.parity);
  for (Eigen::Index i = 0; i < nodes.size(); ++i)
    if (!std::isfinite(nodes.values[i]))
      fail(ErrorKind::validation, "non-finite shift node");
  const Eigen::MatrixXd a = interpolation_matrix(nodes, fs);
  const RuleDiagnostics diag = diagnose(a);
  if (!diag.nonsingular)
    throw SingularNodesError(
        fmt::format("singular {} node matrix (condition estimate {:.3e}, "
                    "determinant {:.3e})",
                    to_string(nodes.parity), diag.condition_estimate,
                    diag.determinant),
        diag);
  const Eigen::VectorXd rhs = rhs_vector(order, fs, nodes.parity);
  return {a.transpose().fullPivLu().solve(rhs), diag};
}

ShiftNodes equidistant_nodes(std::size_t r, Parity parity) {
  if (r == 0) fail(ErrorKind::validation, "r must be >= 1");
  const double rr = static_cast<double>(r);
  ShiftNodes nodes{parity, {}};
  if (parity == Parity::odd) {
    nodes.values.resize(static_cast<Eigen::Index>(r));
    for (std::size_t i = 0; i < r; ++i)
      nodes.values[static_cast<Eigen::Index>(i)] =
          kPi / (2.0 * rr) + static_cast<double>(i) * kPi / rr;
  } else {
    nodes.values.resize(static_cast<Eigen::Index>(r + 1));
    for (std::size_t i = 0; i <= r; ++i)
      nodes.values[static_cast<Eigen::Index>(i)] =
          static_cast<double>(i) * kPi / rr;
  }
  return nodes;
}

ExpandedRule expand_rule(const ShiftNodes& nodes, const Eigen::VectorXd& b,
                         const FrequencySet& fs) {
  const Eigen::Index n = nodes.size();
  if (b.size() != n)
    fail(ErrorKind::validation, "coefficient/node length mismatch");
  std::vector<double> shifts;
  std::vector<double> weights;
  shifts.reserve(static_cast<std::size_t>(2 * n));
  weights.reserve(static_cast<std::size_t>(2 * n));

  if (nodes.parity == Parity::odd) {
    for (Eigen::Index i = 0; i < n; ++i) {
      shifts.push_back(nodes.values[i]);
      weights.push_back(0.5 * b[i]);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      shifts.push_back(-nodes.values[i]);
      weights.push_back(-0.5 * b[i]);
    }
  } else {
    const auto& step = fs.equidistant_step();
    std::vector<Eigen::Index> mirrored;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x = nodes.values[i];
      const bool at_zero = std::abs(x) <= kMergeTol;
      // f(xbar + pi/W) == f(xbar - pi/W) for a 2pi/W periodic slice.
      const bool at_half_period =
          step && lattice_distance(x * *step - kPi, 2.0 * kPi) <= kMergeTol;
      if (at_zero) {
        shifts.push_back(0.0);
        weights.push_back(b[i]);
      } else if (at_half_period) {
        shifts.push_back(x);
        weights.push_back(b[i]);
      } else {
        shifts.push_back(x);
        weights.push_back(0.5 * b[i]);
        mirrored.push_back(i);
      }
    }
    for (Eigen::Index i : mirrored) {
      shifts.push_back(-nodes.values[i]);
      weights.push_back(0.5 * b[i]);
    }
  }
  ExpandedRule rule;
  rule.shifts = Eigen::Map<const Eigen::VectorXd>(
      shifts.data(), static_cast<Eigen::Index>(shifts.size()));
  rule.weights = Eigen::Map<const Eigen::VectorXd>(
      weights.data(), static_cast<Eigen::Index>(weights.size()));
  return rule;
}

PsrRule make_rule(const ShiftNodes& nodes, const FrequencySet& fs, int order) {
  auto [b, diag] = solve_coefficients(nodes, fs, order);
  PsrRule rule;
  rule.order = order;
  rule.parity = nodes.parity;
  rule.nodes = nodes;
  rule.expanded = expand_rule(nodes, b, fs);
  rule.coeffs = std::move(b);
  rule.frequencies = fs;
  rule.diagnostics = diag;
  return rule;
}

PsrRule make_equidistant_rule(const FrequencySet& fs, int order) {
  const auto step = fs.equidistant_step();
  if (!step)
    fail(ErrorKind::validation,
         "equidistant nodes need an equidistant frequency set");
  ShiftNodes nodes = equidistant_nodes(fs.size(), parity_of(order));
  nodes.values /= *step;
  return make_rule(nodes, fs, order);
}

ExpandedRule equidistant_closed_form(std::size_t r, int order) {
  if (order != 1 && order != 2)
    fail(ErrorKind::validation,
         "closed form only for d <= 2; use solve_coefficients");
  if (r == 0) fail(ErrorKind::validation, "r must be >= 1");
  const double rr = static_cast<double>(r);
  ExpandedRule rule;
  if (order == 1) {
    rule.shifts.resize(static_cast<Eigen::Index>(2 * r));
    rule.weights.resize(static_cast<Eigen::Index>(2 * r));
    for (std::size_t i = 1; i <= 2 * r; ++i) {
      const double x = kPi / (2.0 * rr) + static_cast<double>(i - 1) * kPi / rr;
      const double s = std::sin(0.5 * x);
      const auto mu = static_cast<Eigen::Index>(i - 1);
      rule.shifts[mu] = x;
      rule.weights[mu] = ((i - 1) % 2 == 0 ? 1.0 : -1.0) / (4.0 * rr * s * s);
    }
    return rule;
  }
  rule.shifts.resize(static_cast<Eigen::Index>(2 * r));
  rule.weights.resize(static_cast<Eigen::Index>(2 * r));
  rule.shifts[0] = 0.0;
  rule.weights[0] = -(2.0 * rr * rr + 1.0) / 6.0;
  for (std::size_t i = 1; i <= 2 * r - 1; ++i) {
    const double x = static_cast<double>(i) * kPi / rr;
    const double s = std::sin(0.5 * x);
    const auto mu = static_cast<Eigen::Index>(i);
    rule.shifts[mu] = x;
    rule.weights[mu] = ((i - 1) % 2 == 0 ? 1.0 : -1.0) / (2.0 * s * s);
  }
  return rule;
}

double determinant_closed_form(const ShiftNodes& nodes,
                               const FrequencySet& fs) {
  if (!fs.is_integer())
    fail(ErrorKind::validation,
         "closed-form determinant needs integer frequencies {1..r}");
  const auto r = static_cast<Eigen::Index>(fs.size());
  const Eigen::Index n = nodes.size();
  const Eigen::Index expected = nodes.parity == Parity::odd ? r : r + 1;
  if (n != expected)
    fail(ErrorKind::validation, "node count does not match parity");

  double det = std::pow(2.0, static_cast<double>(r * (r - 1)) / 2.0);
  if (nodes.parity == Parity::odd)
    for (Eigen::Index i = 0; i < n; ++i) det *= std::sin(nodes.values[i]);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      det *= std::cos(nodes.values[j]) - std::cos(nodes.values[i]);
  return det;
}

ExpandedRule canonical_periodic(const ExpandedRule& rule) {
  const Eigen::Index n = rule.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Eigen::VectorXd folded(n);
  for (Eigen::Index mu = 0; mu < n; ++mu) {
    double x = std::fmod(rule.shifts[mu], 2.0 * kPi);
    if (x < 0.0) x += 2.0 * kPi;
    if (2.0 * kPi - x <= kMergeTol) x = 0.0;
    folded[mu] = x;
  }
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return folded[a] < folded[b]; });
  ExpandedRule out{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.shifts[k] = folded[order[static_cast<std::size_t>(k)]];
    out.weights[k] = rule.weights[order[static_cast<std::size_t>(k)]];
  }
  return out;
}

namespace {

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                           static_cast<Eigen::Index>(v.size()));
}

}  // namespace

std::string rule_to_json(const PsrRule& rule) {
  nlohmann::ordered_json doc;
  doc["order"] = rule.order;
  doc["parity"] = to_string(rule.parity);
  doc["frequencies"] = rule.frequencies.values();
  doc["nodes"] = to_std(rule.nodes.values);
  doc["b"] = to_std(rule.coeffs);
  doc["expanded"]["phi"] = to_std(rule.expanded.shifts);
  doc["expanded"]["gamma"] = to_std(rule.expanded.weights);
  return doc.dump(2);
}

PsrRule rule_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
    const int order = doc.at("order").get<int>();
    const Parity parity = parse_parity(doc.at("parity").get<std::string>());
    if (parity_of(order) != parity)
      fail(ErrorKind::validation, "rule parity does not match its order");
    FrequencySet fs(doc.at("frequencies").get<std::vector<double>>());
    ShiftNodes nodes{parity, to_eigen(doc.at("nodes").get<std::vector<double>>())};
    // Coefficients are re-derived so an edited document cannot carry a stale b.
    PsrRule rule = make_rule(nodes, fs, order);
    if (doc.contains("b")) {
      const Eigen::VectorXd stored = to_eigen(doc.at("b").get<std::vector<double>>());
      if (stored.size() != rule.coeffs.size() ||
          (stored - rule.coeffs).cwiseAbs().maxCoeff() >
              1e-9 * (1.0 + rule.coeffs.cwiseAbs().maxCoeff()))
        fail(ErrorKind::validation,
             "stored coefficients disagree with the nodes");
    }
    return rule;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::config, fmt::format("malformed rule document: {}", e.what()));
  }
}

}  // namespace epsr
