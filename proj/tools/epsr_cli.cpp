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

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <list>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "epsr/epsr.hpp"
#include "epsr/experiments.hpp"
#include "epsr/finite_difference.hpp"
#include "epsr/optimize.hpp"
#include "epsr/qsim.hpp"
#include "epsr/variance.hpp"

namespace {

using namespace epsr;
using ordered_json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::config, fmt::format("cannot read {}", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

// Fills options of `app` that were not given on the command line from a flat
// JSON object. Keys use underscores where flags use dashes.
void apply_json_config(CLI::App& app, const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::config, fmt::format("{}: {}", path, e.what()));
  }
  if (!doc.is_object()) fail(ErrorKind::config, "config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    std::string flag = key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    CLI::Option* opt = nullptr;
    try {
      opt = app.get_option("--" + flag);
    } catch (const CLI::OptionNotFound&) {
      fail(ErrorKind::config, fmt::format("unknown config key '{}'", key));
    }
    if (opt->count() > 0 || value.is_null()) continue;
    auto as_text = [](const nlohmann::json& v) {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_boolean()) return std::string(v.get<bool>() ? "true" : "false");
      if (v.is_number_float()) return num(v.get<double>());
      return v.dump();
    };
    if (value.is_array()) {
      if (value.empty()) continue;
      for (const auto& item : value) opt->add_result(as_text(item));
    } else {
      opt->add_result(as_text(value));
    }
    try {
      opt->run_callback();
    } catch (const CLI::Error& e) {
      fail(ErrorKind::config, fmt::format("config key '{}': {}", key, e.what()));
    }
  }
}

struct CircuitArgs {
  std::string circuit = "xxz-hva";
  int q = 5;
  int p = 2;
  double delta = 0.5;
  std::uint64_t theta_seed = kDefaultThetaSeed;
  std::vector<double> theta;
  std::size_t param = 0;

  void attach(CLI::App* app) {
    app->add_option("--circuit", circuit, "xxz-hva or a circuit JSON file");
    app->add_option("--q", q, "qubits for xxz-hva");
    app->add_option("--p", p, "layers for xxz-hva");
    app->add_option("--delta", delta, "XXZ anisotropy");
    app->add_option("--theta-seed", theta_seed, "seed for the base point theta_bar");
    app->add_option("--theta", theta, "explicit theta_bar")->delimiter(',');
    app->add_option("--param", param, "parameter index j (0-based)");
  }

  qsim::Circuit build_circuit(std::optional<qsim::PauliSum>& observable) const {
    if (circuit == "xxz-hva") {
      observable = qsim::build_xxz_hamiltonian(q, delta);
      return qsim::build_hva_circuit(q, p);
    }
    const std::string text = read_file(circuit);
    if (nlohmann::json::parse(text, nullptr, false).contains("terms"))
      observable = qsim::observable_from_json(text);
    return qsim::circuit_from_json(text);
  }

  Eigen::VectorXd theta_bar(std::size_t m) const {
    if (theta.empty()) return random_theta(m, theta_seed);
    if (theta.size() != m)
      fail(ErrorKind::validation, fmt::format("--theta needs {} values", m));
    return Eigen::Map<const Eigen::VectorXd>(theta.data(),
                                             static_cast<Eigen::Index>(m));
  }

  qsim::CostSlice slice() const {
    std::optional<qsim::PauliSum> obs;
    qsim::Circuit c = build_circuit(obs);
    if (!obs) fail(ErrorKind::validation, "circuit JSON has no observable terms");
    const Eigen::VectorXd tb = theta_bar(c.num_params);
    return qsim::CostSlice(std::move(c), std::move(*obs), tb, param);
  }
};

ordered_json frequency_json(const FrequencySet& fs, std::string_view source) {
  ordered_json j;
  j["frequencies"] = fs.values();
  j["r"] = fs.size();
  if (fs.equidistant_step())
    j["equidistant_step"] = *fs.equidistant_step();
  else
    j["equidistant_step"] = nullptr;
  j["source"] = source;
  return j;
}

struct FreqCmd {
  std::vector<double> eigs;
  CircuitArgs circuit;
  bool generator_only = false;
  bool from_circuit = false;

  void attach(CLI::App* app) {
    app->add_option("--eigs", eigs, "generator eigenvalues")->delimiter(',');
    circuit.attach(app);
    app->add_flag("--generator-only", generator_only,
                  "skip pruning by the slice's Fourier amplitudes");
  }

  int run(const CLI::App& app) const {
    const bool has_circuit = app.get_option("--circuit")->count() > 0 ||
                             app.get_option("--param")->count() > 0;
    if (eigs.empty() == !has_circuit)
      fail(ErrorKind::validation, "give exactly one of --eigs or --circuit/--param");
    ordered_json out;
    if (!eigs.empty()) {
      out = frequency_json(positive_difference_frequencies(eigs), "eigenvalues");
    } else if (generator_only) {
      std::optional<qsim::PauliSum> obs;
      out = frequency_json(
          qsim::generator_frequencies(circuit.build_circuit(obs), circuit.param),
          "generator");
    } else {
      out = frequency_json(qsim::slice_frequencies(circuit.slice()), "slice");
    }
    fmt::print("{}\n", out.dump(2));
    return 0;
  }
};

struct RuleCmd {
  std::vector<double> freqs;
  int order = 1;
  bool equidistant = false;
  std::vector<double> nodes;
  std::string optimize;
  std::uint64_t seed = 0;
  int generations = 300;
  bool polish = true;
  std::string trace;

  void attach(CLI::App* app) {
    app->add_option("--freqs", freqs, "frequency set")->delimiter(',');
    app->add_option("--d", order, "derivative order")->check(CLI::PositiveNumber);
    app->add_flag("--equidistant", equidistant, "equidistant nodes");
    app->add_option("--nodes", nodes, "explicit nodes")->delimiter(',');
    app->add_option("--optimize", optimize, "search nodes under unif or wgt");
    app->add_option("--seed", seed, "search seed");
    app->add_option("--generations", generations, "DE generations");
    app->add_option("--polish", polish, "finish the search with local descent");
    app->add_option("--trace", trace, "JSON-lines trace of the local polish");
  }

  int run() const {
    if (freqs.empty()) fail(ErrorKind::validation, "--freqs is required");
    const FrequencySet fs(freqs);
    const int sources = int(equidistant) + int(!nodes.empty()) + int(!optimize.empty());
    if (sources != 1)
      fail(ErrorKind::validation,
           "give exactly one of --equidistant, --nodes, --optimize");
    std::optional<OptimizeResult> found;
    PsrRule rule;
    if (equidistant) {
      rule = make_equidistant_rule(fs, order);
    } else if (!nodes.empty()) {
      ShiftNodes sn{parity_of(order),
                    Eigen::Map<const Eigen::VectorXd>(
                        nodes.data(), static_cast<Eigen::Index>(nodes.size()))};
      rule = make_rule(sn, fs, order);
    } else {
      GlobalOptions opt;
      opt.scheme = parse_scheme(optimize);
      opt.seed = seed;
      opt.generations = generations;
      opt.polish = polish;
      std::ofstream trace_out;
      if (!trace.empty()) {
        trace_out.open(trace);
        if (!trace_out) fail(ErrorKind::config, fmt::format("cannot write {}", trace));
        opt.trace = [&trace_out](const TraceRecord& rec) {
          trace_out << trace_to_json_line(rec) << '\n';
        };
      }
      found = optimize_shifts_global(fs, order, opt);
      rule = make_rule(found->nodes, fs, order);
    }
    ordered_json out = ordered_json::parse(rule_to_json(rule));
    out["F_unif"] = uniform_objective(rule.nodes, fs, order);
    out["F_wgt"] = weighted_objective(rule.nodes, fs, order);
    if (found) {
      out["search"] = {{"scheme", optimize},
                       {"objective", found->objective},
                       {"converged", found->converged},
                       {"certificate", found->certificate
                                           ? ordered_json(*found->certificate)
                                           : ordered_json(nullptr)}};
    }
    fmt::print("{}\n", out.dump(2));
    return 0;
  }
};

struct EstimateCmd {
  CircuitArgs circuit;
  std::optional<double> xbar;
  int order = 1;
  std::vector<double> nodes;
  std::string rule_file;
  std::string scheme = "both";
  long n_total = 1000;
  std::string shots;
  std::string noise = "multinomial";
  std::uint64_t seed = 1;
  int repetitions = 500;
  std::string output;
  bool reproducible = false;

  void attach(CLI::App* app) {
    circuit.attach(app);
    app->add_option("--xbar", xbar, "evaluation point, default theta_bar[j]");
    app->add_option("--d", order, "derivative order")->check(CLI::PositiveNumber);
    app->add_option("--nodes", nodes, "explicit nodes")->delimiter(',');
    app->add_option("--rule-file", rule_file, "rule JSON from the rule command");
    app->add_option("--scheme", scheme, "uniform, weighted or both");
    app->add_option("--n-total", n_total, "total shots per estimate")
        ->check(CLI::PositiveNumber);
    app->add_option("--shots", shots, "'inf' selects exact evaluation");
    app->add_option("--noise", noise, "multinomial, gaussian or exact");
    app->add_option("--seed", seed, "master seed");
    app->add_option("--repetitions", repetitions, "independent estimates")
        ->check(CLI::PositiveNumber);
    app->add_option("--output", output, "CSV path, default stdout");
    app->add_flag("--reproducible", reproducible, "omit the timestamp line");
  }

  int run() const {
    qsim::CostSlice slice = circuit.slice();
    if (xbar) {
      Eigen::VectorXd tb = slice.theta_bar();
      tb[static_cast<Eigen::Index>(slice.index())] = *xbar;
      slice = qsim::CostSlice(slice.circuit(), slice.observable(), tb, slice.index());
    }
    PsrRule rule;
    if (!rule_file.empty()) {
      rule = rule_from_json(read_file(rule_file));
    } else {
      const FrequencySet fs = qsim::slice_frequencies(slice);
      if (nodes.empty()) {
        rule = default_rule(fs, order);
      } else {
        ShiftNodes sn{parity_of(order),
                      Eigen::Map<const Eigen::VectorXd>(
                          nodes.data(), static_cast<Eigen::Index>(nodes.size()))};
        rule = make_rule(sn, fs, order);
      }
    }

    qsim::NoiseModel model = qsim::NoiseModel::multinomial;
    if (shots == "inf" || noise == "exact") model = qsim::NoiseModel::exact;
    else if (noise == "gaussian") model = qsim::NoiseModel::gaussian;
    else if (noise != "multinomial")
      fail(ErrorKind::validation, fmt::format("unknown noise model '{}'", noise));
    if (!shots.empty() && shots != "inf")
      fail(ErrorKind::validation, "--shots only accepts 'inf'; use --n-total");

    std::ostringstream body;
    if (!reproducible)
      body << fmt::format("# noise={} n_total={} seed={}\n", qsim::to_string(model),
                          n_total, seed);
    if (model == qsim::NoiseModel::exact) {
      const double est = apply_rule(rule, slice, slice.base_point());
      const double ref =
          central_difference(slice, slice.base_point(), rule.order, 1e-2);
      body << "estimate,finite_difference\n" << num(est) << ',' << num(ref) << '\n';
    } else {
      std::vector<Scheme> schemes;
      if (scheme == "both") schemes = {Scheme::uniform, Scheme::weighted};
      else schemes = {parse_scheme(scheme)};
      std::vector<std::vector<double>> columns;
      body << "repetition";
      for (Scheme s : schemes) {
        body << ',' << to_string(s);
        columns.push_back(repeat_estimates(
            slice, rule.expanded, s, n_total, repetitions, model,
            derive_seed(seed, {static_cast<std::uint64_t>(s)})));
      }
      body << '\n';
      for (int rep = 0; rep < repetitions; ++rep) {
        body << rep;
        for (const auto& col : columns) body << ',' << num(col[rep]);
        body << '\n';
      }
    }
    if (output.empty()) {
      std::cout << body.str();
    } else {
      std::ofstream out(output);
      if (!out) fail(ErrorKind::config, fmt::format("cannot write {}", output));
      out << body.str();
    }
    return 0;
  }
};

struct ExperimentCmd {
  ExperimentConfig config;
  std::string scheme = "weighted";
  std::string noise = "multinomial";
  std::vector<double> theta_bar;

  void attach(CLI::App* app) {
    app->add_option("--experiment", config.experiment,
                    "result1, result2, result3, landscape or de-sweep");
    app->add_option("--q", config.q);
    app->add_option("--p", config.p);
    app->add_option("--delta", config.delta);
    app->add_option("--seed", config.seed);
    app->add_option("--n-total", config.n_total);
    app->add_option("--repetitions", config.repetitions);
    app->add_option("--params", config.params)->delimiter(',');
    app->add_option("--orders", config.orders)->delimiter(',');
    app->add_option("--scheme", scheme);
    app->add_option("--output", config.output, "output directory");
    app->add_option("--noise", noise, "multinomial, gaussian or exact");
    app->add_option("--theta-bar", theta_bar)->delimiter(',');
    app->add_option("--theta-seed", config.theta_seed);
    app->add_option("--max-r", config.max_r);
    app->add_option("--max-d", config.max_d);
    app->add_option("--generations", config.generations);
    app->add_option("--fd-step", config.fd_step);
    app->add_flag("--reproducible", config.reproducible);
    app->add_flag("--emit-gnuplot", config.emit_gnuplot);
  }

  int run() {
    ExperimentConfig c = config;
    c.scheme = parse_scheme(scheme);
    if (noise == "exact") c.noise = qsim::NoiseModel::exact;
    else if (noise == "gaussian") c.noise = qsim::NoiseModel::gaussian;
    else if (noise == "multinomial") c.noise = qsim::NoiseModel::multinomial;
    else fail(ErrorKind::config, fmt::format("unknown noise model '{}'", noise));
    if (!theta_bar.empty()) c.theta_bar = theta_bar;
    for (const auto& path : run_experiment(c)) fmt::print("{}\n", path);
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extended parameter shift rules: frequencies, rules, estimates"};
  app.require_subcommand(1);

  FreqCmd freq;
  RuleCmd rule;
  EstimateCmd estimate;
  ExperimentCmd experiment;
  std::list<std::pair<CLI::App*, std::string>> configs;
  auto add = [&](const char* name, const char* help, auto& cmd) {
    CLI::App* sub = app.add_subcommand(name, help);
    cmd.attach(sub);
    configs.emplace_back(sub, std::string{});
    sub->add_option("--config", configs.back().second, "JSON file of flag values");
    return sub;
  };
  CLI::App* freq_app = add("freq", "frequency set of a generator or circuit slice", freq);
  CLI::App* rule_app = add("rule", "parameter shift rule for a frequency set", rule);
  CLI::App* est_app = add("estimate", "sampled or exact derivative estimates", estimate);
  CLI::App* exp_app = add("experiment", "reproduce a numerical experiment", experiment);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_code(ErrorKind::validation);
  }

  try {
    for (auto& [sub, path] : configs)
      if (sub->parsed() && !path.empty()) apply_json_config(*sub, path);
    if (freq_app->parsed()) return freq.run(*freq_app);
    if (rule_app->parsed()) return rule.run();
    if (est_app->parsed()) return estimate.run();
    if (exp_app->parsed()) return experiment.run();
  } catch (const Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return exit_code(ErrorKind::numerical);
  }
  return 0;
}
