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

#include "epsr/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <set>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "epsr/finite_difference.hpp"
#include "epsr/optimize.hpp"
#include "epsr/parallel.hpp"

namespace epsr {
namespace {

constexpr double kPi = std::numbers::pi;

std::string num(double v) { return fmt::format("{:.17g}", v); }

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, bool reproducible,
            const std::vector<std::string>& columns)
      : out_(path) {
    if (!out_) fail(ErrorKind::config, fmt::format("cannot write {}", path.string()));
    if (!reproducible)
      out_ << fmt::format("# generated {:%Y-%m-%dT%H:%M:%S}Z\n",
                          fmt::gmtime(std::chrono::system_clock::to_time_t(
                              std::chrono::system_clock::now())));
    out_ << fmt::format("{}\n", fmt::join(columns, ","));
  }

  void row(const std::vector<std::string>& cells) {
    out_ << fmt::format("{}\n", fmt::join(cells, ","));
  }

 private:
  std::ofstream out_;
};

std::vector<std::size_t> params_or(const ExperimentConfig& c,
                                   std::vector<std::size_t> fallback) {
  return c.params.empty() ? fallback : c.params;
}

std::vector<int> orders_or(const ExperimentConfig& c, std::vector<int> fallback) {
  return c.orders.empty() ? fallback : c.orders;
}

qsim::CostSlice slice_for(const ExperimentConfig& c, std::size_t param) {
  return make_xxz_slice(c.q, c.p, c.delta, theta_bar_of(c), param);
}

std::string freq_label(const std::vector<double>& fs) {
  return fmt::format("{{{}}}", fmt::join(fs, " "));
}

void write_gnuplot(const std::filesystem::path& dir, const std::string& name,
                   const std::string& body, std::vector<std::string>& written) {
  const auto path = dir / (name + ".gp");
  std::ofstream out(path);
  out << "set datafile separator ','\nset datafile commentschars '#'\n" << body;
  written.push_back(path.string());
}

}  // namespace

void validate(const ExperimentConfig& c) {
  static const std::vector<std::string> known = {"result1", "result2", "result3",
                                                 "landscape", "de-sweep"};
  if (std::find(known.begin(), known.end(), c.experiment) == known.end())
    fail(ErrorKind::config, fmt::format("unknown experiment '{}'", c.experiment));
  if (c.q < 3 || c.q > qsim::kMaxQubits)
    fail(ErrorKind::config, "q must lie in 3..12");
  if (c.p < 1 || c.n_total < 1 || c.repetitions < 2 || c.max_r < 1 ||
      c.max_d < 1 || c.generations < 0)
    fail(ErrorKind::config, "counts must be positive");
  if (!(c.fd_step > 0.0)) fail(ErrorKind::config, "fd_step must be positive");
  for (std::size_t j : c.params)
    if (j >= static_cast<std::size_t>(4 * c.p))
      fail(ErrorKind::config, fmt::format("parameter index {} out of range", j));
  for (int d : c.orders)
    if (d < 1) fail(ErrorKind::config, "orders must be positive");
  if (c.theta_bar && c.theta_bar->size() != static_cast<std::size_t>(4 * c.p))
    fail(ErrorKind::config, "theta_bar length must be 4 p");
  if (c.scheme == Scheme::custom)
    fail(ErrorKind::config, "experiments use the uniform or weighted scheme");
}

ExperimentConfig config_from_json(std::string_view text) {
  ExperimentConfig c;
  try {
    const auto j = nlohmann::json::parse(text);
    static const std::set<std::string> known{
        "experiment", "q", "p", "delta", "seed", "n_total", "repetitions",
        "params", "orders", "scheme", "output", "noise", "theta_bar",
        "theta_seed", "max_r", "max_d", "generations", "fd_step",
        "reproducible", "emit_gnuplot"};
    if (!j.is_object()) fail(ErrorKind::config, "config must be a JSON object");
    for (const auto& [key, value] : j.items())
      if (!known.count(key)) fail(ErrorKind::config, fmt::format("unknown config key '{}'", key));
    c.experiment = j.at("experiment").get<std::string>();
    c.q = j.value("q", c.q);
    c.p = j.value("p", c.p);
    c.delta = j.value("delta", c.delta);
    c.seed = j.value("seed", c.seed);
    c.n_total = j.value("n_total", c.n_total);
    c.repetitions = j.value("repetitions", c.repetitions);
    c.params = j.value("params", c.params);
    c.orders = j.value("orders", c.orders);
    if (j.contains("scheme")) c.scheme = parse_scheme(j["scheme"].get<std::string>());
    c.output = j.value("output", c.output);
    if (j.contains("noise")) {
      const auto n = j["noise"].get<std::string>();
      if (n == "exact") c.noise = qsim::NoiseModel::exact;
      else if (n == "multinomial") c.noise = qsim::NoiseModel::multinomial;
      else if (n == "gaussian") c.noise = qsim::NoiseModel::gaussian;
      else fail(ErrorKind::config, fmt::format("unknown noise model '{}'", n));
    }
    if (j.contains("theta_bar")) c.theta_bar = j["theta_bar"].get<std::vector<double>>();
    c.theta_seed = j.value("theta_seed", c.theta_seed);
    c.max_r = j.value("max_r", c.max_r);
    c.max_d = j.value("max_d", c.max_d);
    c.generations = j.value("generations", c.generations);
    c.fd_step = j.value("fd_step", c.fd_step);
    c.reproducible = j.value("reproducible", c.reproducible);
    c.emit_gnuplot = j.value("emit_gnuplot", c.emit_gnuplot);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::config, fmt::format("config JSON: {}", e.what()));
  } catch (const Error& e) {
    fail(ErrorKind::config, e.what());
  }
  validate(c);
  return c;
}

std::string config_to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["experiment"] = c.experiment;
  j["q"] = c.q;
  j["p"] = c.p;
  j["delta"] = c.delta;
  j["seed"] = c.seed;
  j["n_total"] = c.n_total;
  j["repetitions"] = c.repetitions;
  j["params"] = c.params;
  j["orders"] = c.orders;
  j["scheme"] = to_string(c.scheme);
  j["output"] = c.output;
  j["noise"] = qsim::to_string(c.noise);
  const Eigen::VectorXd theta = theta_bar_of(c);
  j["theta_bar"] = std::vector<double>(theta.data(), theta.data() + theta.size());
  j["theta_seed"] = c.theta_seed;
  j["max_r"] = c.max_r;
  j["max_d"] = c.max_d;
  j["generations"] = c.generations;
  j["fd_step"] = c.fd_step;
  j["reproducible"] = c.reproducible;
  j["emit_gnuplot"] = c.emit_gnuplot;
  return j.dump(2);
}

Eigen::VectorXd random_theta(std::size_t m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
  Eigen::VectorXd theta(static_cast<Eigen::Index>(m));
  for (Eigen::Index i = 0; i < theta.size(); ++i) theta[i] = u(rng);
  return theta;
}

Eigen::VectorXd theta_bar_of(const ExperimentConfig& c) {
  if (c.theta_bar)
    return Eigen::Map<const Eigen::VectorXd>(
        c.theta_bar->data(), static_cast<Eigen::Index>(c.theta_bar->size()));
  return random_theta(static_cast<std::size_t>(4 * c.p), c.theta_seed);
}

qsim::CostSlice make_xxz_slice(int q, int p, double delta,
                               const Eigen::VectorXd& theta_bar,
                               std::size_t index) {
  return qsim::CostSlice(qsim::build_hva_circuit(q, p),
                         qsim::build_xxz_hamiltonian(q, delta), theta_bar, index);
}

std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> path) {
  std::vector<std::uint64_t> words{master};
  words.insert(words.end(), path.begin(), path.end());
  std::vector<std::uint32_t> halves;
  for (std::uint64_t w : words) {
    halves.push_back(static_cast<std::uint32_t>(w));
    halves.push_back(static_cast<std::uint32_t>(w >> 32));
  }
  std::seed_seq seq(halves.begin(), halves.end());
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (std::uint64_t{out[1]} << 32) | out[0];
}

PsrRule default_rule(const FrequencySet& fs, int order) {
  if (fs.equidistant_step()) return make_equidistant_rule(fs, order);
  GlobalOptions opt;
  opt.polish = true;
  return make_rule(optimize_shifts_global(fs, order, opt).nodes, fs, order);
}

double estimate_derivative(const qsim::CostSlice& slice,
                           const ExpandedRule& rule,
                           const std::vector<long>& shots,
                           qsim::NoiseModel noise, std::uint64_t seed) {
  if (noise != qsim::NoiseModel::exact &&
      shots.size() != static_cast<std::size_t>(rule.size()))
    fail(ErrorKind::validation, "one shot count per rule term required");
  const double xbar = slice.base_point();
  double value = 0.0;
  for (Eigen::Index mu = 0; mu < rule.size(); ++mu) {
    const double x = xbar + rule.shifts[mu];
    if (noise == qsim::NoiseModel::exact) {
      value += rule.weights[mu] * slice(x);
      continue;
    }
    const long n = shots[static_cast<std::size_t>(mu)];
    if (n == 0) continue;
    value += rule.weights[mu] *
             slice.evaluate(x, noise, n,
                            derive_seed(seed, {static_cast<std::uint64_t>(mu)}));
  }
  return value;
}

std::vector<double> repeat_estimates(const qsim::CostSlice& slice,
                                     const ExpandedRule& rule, Scheme scheme,
                                     long n_total, int repetitions,
                                     qsim::NoiseModel noise,
                                     std::uint64_t seed) {
  const ShotAllocation alloc =
      allocate(scheme, rule.weights, static_cast<double>(n_total));
  const std::vector<long> shots = round_allocation(alloc, rule.weights, n_total);
  std::vector<double> out(static_cast<std::size_t>(repetitions));
  parallel_for(out.size(), [&](std::size_t rep) {
    out[rep] = estimate_derivative(slice, rule, shots, noise,
                                   derive_seed(seed, {rep}));
  });
  return out;
}

double sample_mean(const std::vector<double>& xs) {
  if (xs.empty()) fail(ErrorKind::validation, "empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_variance(const std::vector<double>& xs) {
  if (xs.size() < 2) fail(ErrorKind::validation, "variance needs two samples");
  const double m = sample_mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

double mean_shot_variance(const qsim::CostSlice& slice, const ExpandedRule& rule) {
  double s = 0.0;
  for (Eigen::Index mu = 0; mu < rule.size(); ++mu)
    s += slice.one_shot_variance(slice.base_point() + rule.shifts[mu]);
  return s / static_cast<double>(rule.size());
}

std::vector<Result1Row> result1_errors(const ExperimentConfig& c) {
  const auto params = params_or(c, [&] {
    std::vector<std::size_t> all(static_cast<std::size_t>(4 * c.p));
    for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
    return all;
  }());
  const auto orders = orders_or(c, {1, 2});
  std::vector<Result1Row> rows;
  for (std::size_t j : params) {
    const qsim::CostSlice slice = slice_for(c, j);
    const FrequencySet fs = qsim::slice_frequencies(slice);
    for (int d : orders) {
      const PsrRule rule = default_rule(fs, d);
      Result1Row row;
      row.param = j;
      row.order = d;
      row.frequencies = fs.values();
      row.epsr = apply_rule(rule, slice, slice.base_point());
      row.reference = central_difference(slice, slice.base_point(), d, c.fd_step);
      row.abs_error = std::abs(row.epsr - row.reference);
      rows.push_back(row);
    }
  }
  return rows;
}

ComparisonSummary result2_compare(const ExperimentConfig& c, std::size_t param) {
  const qsim::CostSlice slice = slice_for(c, param);
  const FrequencySet fs = qsim::slice_frequencies(slice);
  const int d = orders_or(c, {1}).front();
  const PsrRule rule = default_rule(fs, d);
  const double sigma2 = mean_shot_variance(slice, rule.expanded);

  ComparisonSummary s;
  s.param = param;
  s.exact = apply_rule(rule, slice, slice.base_point());
  for (Scheme scheme : {Scheme::uniform, Scheme::weighted}) {
    s.labels.emplace_back(to_string(scheme));
    s.predicted.push_back(
        predicted_variance(rule.coeffs, rule.parity, scheme).predicted_scaled_variance);
    s.estimates.push_back(repeat_estimates(
        slice, rule.expanded, scheme, c.n_total, c.repetitions, c.noise,
        derive_seed(c.seed, {param, static_cast<std::uint64_t>(scheme)})));
    s.sample_variance.push_back(sample_variance(s.estimates.back()));
    s.scaled_variance.push_back(s.sample_variance.back() *
                                static_cast<double>(c.n_total) / sigma2);
  }
  return s;
}

std::vector<ShiftNodes> random_node_sets(const FrequencySet& fs, int order,
                                         std::uint64_t seed, std::size_t count) {
  const Parity parity = parity_of(order);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, kPi);
  std::vector<ShiftNodes> sets;
  while (sets.size() < count) {
    ShiftNodes nodes{parity, Eigen::VectorXd(static_cast<Eigen::Index>(
                                 parity == Parity::odd ? fs.size() : fs.size() + 1))};
    for (Eigen::Index i = 0; i < nodes.size(); ++i) nodes.values[i] = u(rng);
    if (parity == Parity::even) nodes.values[0] = 0.0;
    std::sort(nodes.values.data(), nodes.values.data() + nodes.size());
    try {
      solve_coefficients(nodes, fs, order);
      sets.push_back(nodes);
    } catch (const SingularNodesError&) {
    }
  }
  return sets;
}

ComparisonSummary result3_compare(const ExperimentConfig& c, std::size_t param) {
  const qsim::CostSlice slice = slice_for(c, param);
  const FrequencySet fs = qsim::slice_frequencies(slice);
  const int d = orders_or(c, {1}).front();

  std::vector<std::pair<std::string, PsrRule>> rules;
  rules.emplace_back("equidistant", default_rule(fs, d));
  const auto randoms = random_node_sets(fs, d, derive_seed(c.seed, {param, 99}), 2);
  for (std::size_t k = 0; k < randoms.size(); ++k)
    rules.emplace_back(fmt::format("random{}", k + 1), make_rule(randoms[k], fs, d));

  ComparisonSummary s;
  s.param = param;
  s.exact = apply_rule(rules.front().second, slice, slice.base_point());
  for (std::size_t k = 0; k < rules.size(); ++k) {
    const auto& [label, rule] = rules[k];
    s.labels.push_back(label);
    s.predicted.push_back(
        predicted_variance(rule.coeffs, rule.parity, c.scheme).predicted_scaled_variance);
    s.estimates.push_back(repeat_estimates(slice, rule.expanded, c.scheme,
                                           c.n_total, c.repetitions, c.noise,
                                           derive_seed(c.seed, {param, k})));
    s.sample_variance.push_back(sample_variance(s.estimates.back()));
    s.scaled_variance.push_back(s.sample_variance.back() *
                                static_cast<double>(c.n_total) /
                                mean_shot_variance(slice, rule.expanded));
  }
  return s;
}

std::vector<SweepRow> de_sweep(const ExperimentConfig& c) {
  std::vector<SweepRow> rows;
  for (int r = 1; r <= c.max_r; ++r) {
    const FrequencySet fs = FrequencySet::integers(static_cast<std::size_t>(r));
    for (int d = 1; d <= c.max_d; ++d) {
      GlobalOptions opt;
      opt.scheme = Scheme::weighted;
      opt.generations = c.generations;
      opt.seed = derive_seed(c.seed, {static_cast<std::uint64_t>(r),
                                      static_cast<std::uint64_t>(d)});
      opt.polish = true;
      const OptimizeResult res = optimize_shifts_global(fs, d, opt);
      const ShiftNodes equi =
          equidistant_nodes(static_cast<std::size_t>(r), parity_of(d));
      rows.push_back({r, d, max_node_error(res.nodes, equi), res.objective,
                      std::pow(static_cast<double>(r), d)});
    }
  }
  return rows;
}

std::vector<std::string> run_experiment(const ExperimentConfig& c) {
  validate(c);
  const std::filesystem::path dir(c.output);
  std::filesystem::create_directories(dir);
  std::vector<std::string> written;
  auto path = [&](const std::string& name) {
    written.push_back((dir / name).string());
    return dir / name;
  };
  {
    std::ofstream cfg(path(c.experiment + "_config.json"));
    cfg << config_to_json(c) << '\n';
  }

  if (c.experiment == "result1") {
    CsvWriter csv(path("result1_errors.csv"), c.reproducible,
                  {"param", "order", "frequencies", "epsr", "reference", "abs_error"});
    for (const auto& row : result1_errors(c))
      csv.row({std::to_string(row.param), std::to_string(row.order),
               freq_label(row.frequencies), num(row.epsr), num(row.reference),
               num(row.abs_error)});
    if (c.emit_gnuplot)
      write_gnuplot(dir, "result1",
                    "set logscale y\nset xlabel 'parameter'\nset ylabel 'abs error'\n"
                    "plot for [d=1:2] 'result1_errors.csv' using "
                    "($2==d?$1:1/0):6 with points title sprintf('d=%d',d)\n",
                    written);
  } else if (c.experiment == "result2" || c.experiment == "result3") {
    const bool two = c.experiment == "result2";
    CsvWriter summary(path(c.experiment + "_summary.csv"), c.reproducible,
                      {"param", "label", "predicted_scaled", "sample_variance",
                       "empirical_scaled", "exact_derivative"});
    std::string plot;
    for (std::size_t j : params_or(c, {0, 1})) {
      const ComparisonSummary s = two ? result2_compare(c, j) : result3_compare(c, j);
      const std::string name = fmt::format("{}_param{}.csv", c.experiment, j);
      std::vector<std::string> cols{"repetition"};
      cols.insert(cols.end(), s.labels.begin(), s.labels.end());
      CsvWriter csv(path(name), c.reproducible, cols);
      for (std::size_t rep = 0; rep < s.estimates.front().size(); ++rep) {
        std::vector<std::string> cells{std::to_string(rep)};
        for (const auto& column : s.estimates) cells.push_back(num(column[rep]));
        csv.row(cells);
      }
      for (std::size_t k = 0; k < s.labels.size(); ++k)
        summary.row({std::to_string(j), s.labels[k], num(s.predicted[k]),
                     num(s.sample_variance[k]), num(s.scaled_variance[k]),
                     num(s.exact)});
      plot += fmt::format(
          "set title 'parameter {}'\nplot for [k=2:{}] '{}' using k:(1) "
          "smooth kdensity title columnheader(k)\n",
          j, s.labels.size() + 1, name);
    }
    if (c.emit_gnuplot) write_gnuplot(dir, c.experiment, plot, written);
  } else if (c.experiment == "landscape") {
    const FrequencySet fs = FrequencySet::integers(2);
    std::string plot = "set view map\n";
    for (int d : orders_or(c, {1})) {
      for (Scheme scheme : {Scheme::uniform, Scheme::weighted}) {
        const std::string name =
            fmt::format("landscape_{}_d{}.csv", to_string(scheme), d);
        CsvWriter csv(path(name), c.reproducible, {"x1", "x2", "F"});
        const Parity parity = parity_of(d);
        for (int i = 0; i < 61; ++i) {
          for (int k = 0; k < 61; ++k) {
            const double x1 = kPi * (i + 1) / 62.0;
            const double x2 = kPi * (k + 1) / 62.0;
            ShiftNodes nodes{parity, {}};
            if (parity == Parity::odd)
              nodes.values = Eigen::Vector2d(x1, x2);
            else
              nodes.values = Eigen::Vector3d(0.0, x1, x2);
            csv.row({num(x1), num(x2), num(shift_objective(scheme, nodes, fs, d))});
          }
        }
        plot += fmt::format("splot '{}' using 1:2:(log10($3)) with image title '{}'\n",
                            name, name);
      }
    }
    if (c.emit_gnuplot) write_gnuplot(dir, "landscape", plot, written);
  } else {
    CsvWriter csv(path("de_sweep.csv"), c.reproducible,
                  {"r", "d", "max_error", "objective", "expected"});
    for (const auto& row : de_sweep(c))
      csv.row({std::to_string(row.r), std::to_string(row.d), num(row.max_error),
               num(row.objective), num(row.expected)});
    if (c.emit_gnuplot)
      write_gnuplot(dir, "de_sweep",
                    "set view map\nset xlabel 'r'\nset ylabel 'd'\n"
                    "plot 'de_sweep.csv' using 1:2:(log10($3+1e-16)) with image\n",
                    written);
  }
  return written;
}

}  // namespace epsr
