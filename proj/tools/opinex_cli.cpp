// Command-line front end: one subcommand per experiment plus the game-theory primitives.

#include "opinex/core.hpp"
#include "opinex/experiments.hpp"
#include "opinex/scenario.hpp"
#include "opinex/shapley.hpp"
#include "opinex/text.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using json = nlohmann::ordered_json;

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::string out;
  double tol = 1e-9;
  std::string json_summary;
};

// Writes to --out when given, otherwise to stdout.
void write_output(const GlobalOptions& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(g.out, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file '" + g.out + "'");
  out << text;
  if (!out) throw std::runtime_error("I/O error while writing '" + g.out + "'");
}

void write_summary(const GlobalOptions& g, const json& record) {
  if (g.json_summary.empty()) return;
  std::ofstream out(g.json_summary);
  if (!out) throw std::runtime_error("cannot open summary file '" + g.json_summary + "'");
  out << record.dump(2) << '\n';
}

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string allocation_csv(const opinex::Allocation& g) {
  std::ostringstream os;
  os << "player,payoff\n";
  for (int i = 0; i < g.players(); ++i) os << i << ',' << opinex::format_double(g.payoffs[i]) << '\n';
  return os.str();
}

int run_simulate(const GlobalOptions& g, const std::string& path, const std::string& models_prefix) {
  const auto scenario = opinex::load_scenario(path, g.seed);
  const auto trace = opinex::simulate(scenario.setup());
  std::ostringstream os;
  opinex::emit_trace(os, trace);
  write_output(g, os.str());
  if (!models_prefix.empty()) {
    for (std::size_t i = 0; i < trace.models.size(); ++i) {
      if (!trace.models[i]) continue;
      const std::string file = models_prefix + std::to_string(i) + ".csv";
      std::ofstream out(file);
      if (!out) throw std::runtime_error("cannot open model file '" + file + "'");
      trace.models[i]->write_csv(out);
    }
  }
  const int steps = static_cast<int>(trace.steps.size()) - 1;
  const double drift = opinex::max_average_drift(trace);
  std::cerr << "steps=" << steps << " converged=" << (trace.converged ? "yes" : "no")
            << " average_drift=" << opinex::format_double(drift) << '\n';
  write_summary(g, json{{"command", "simulate"},
                        {"scenario", path},
                        {"seed", scenario.seed},
                        {"steps", steps},
                        {"converged", trace.converged},
                        {"average_drift", number(drift)},
                        {"verdict", "PASS"}});
  return 0;
}

int run_shapley(const GlobalOptions& g, const std::string& path) {
  const auto f = opinex::load_set_function(path);
  const auto alloc = opinex::shapley_value(f);
  write_output(g, allocation_csv(alloc));
  json payoffs = json::array();
  for (int i = 0; i < alloc.players(); ++i) payoffs.push_back(alloc.payoffs[i]);
  write_summary(g, json{{"command", "shapley"}, {"payoffs", payoffs}, {"verdict", "PASS"}});
  return 0;
}

int report_core(const GlobalOptions& g, const std::string& command, const opinex::CoreVerdict& verdict) {
  std::string text = verdict.empty ? "empty\n" : "nonempty\n";
  if (!verdict.empty) text += allocation_csv(verdict.witness);
  write_output(g, text);
  json record{{"command", command}, {"empty", verdict.empty}, {"pivots", verdict.pivots}, {"verdict", "PASS"}};
  if (!verdict.empty) {
    json w = json::array();
    for (int i = 0; i < verdict.witness.players(); ++i) w.push_back(verdict.witness.payoffs[i]);
    record["witness"] = w;
  }
  write_summary(g, record);
  return 0;
}

int run_core_check(const GlobalOptions& g, const std::string& path) {
  const auto f = opinex::load_set_function(path);
  return report_core(g, "core-check", opinex::check_core(f, opinex::LpOptions{g.tol, 0}));
}

int run_bayesian_core(const GlobalOptions& g, const std::vector<std::string>& paths) {
  std::vector<opinex::SetFunction> opinions;
  for (const auto& p : paths) opinions.push_back(opinex::load_set_function(p));
  return report_core(g, "bayesian-core", opinex::check_bayesian_core(opinions, opinex::LpOptions{g.tol, 0}));
}

int run_efficiency(const GlobalOptions& g, const std::string& path) {
  const auto scenario = opinex::load_scenario(path, g.seed);
  const double po = scenario.risk_scale.value_or(1.0);
  const auto r = opinex::experiment_efficiency(scenario.setup(), po, g.tol);
  std::ostringstream os;
  os << "case,drift,tolerance,verdict\n";
  os << "proportional," << opinex::format_double(r.drift) << ',' << opinex::format_double(r.tolerance) << ','
     << (r.pass ? "PASS" : "FAIL") << '\n';
  if (!r.degenerate) {
    os << "equal_p_control," << opinex::format_double(r.control_drift) << ",1e-06,"
       << (!r.control_applicable ? "N/A" : r.control_drift > 1e-6 ? "DRIFTS" : "NO_DRIFT") << '\n';
  }
  write_output(g, os.str());
  std::cerr << (r.pass ? "PASS" : "FAIL") << " efficiency drift=" << opinex::format_double(r.drift)
            << (r.degenerate ? " (single player, degenerate)" : "") << '\n';
  write_summary(g, json{{"command", "exp-efficiency"},
                        {"scenario", path},
                        {"seed", scenario.seed},
                        {"po", po},
                        {"drift", number(r.drift)},
                        {"control_drift", number(r.control_drift)},
                        {"control_applicable", r.control_applicable},
                        {"degenerate", r.degenerate},
                        {"verdict", r.pass ? "PASS" : "FAIL"}});
  return r.pass ? 0 : 1;
}

struct CoreOverrides {
  std::optional<int> n_min, n_max, trials;
  std::optional<double> sigma, exponent;
};

int run_core_emptiness(const GlobalOptions& g, const std::string& path, const CoreOverrides& o) {
  opinex::CoreEmptinessConfig config;
  std::uint64_t seed = g.seed.value_or(0);
  if (!path.empty()) {
    const auto scenario = opinex::load_scenario(path, g.seed);
    config = scenario.core;
    seed = scenario.seed;
  }
  if (o.n_min) config.n_min = *o.n_min;
  if (o.n_max) config.n_max = *o.n_max;
  if (o.trials) config.trials = *o.trials;
  if (o.sigma) config.sigma = *o.sigma;
  if (o.exponent) config.exponent = *o.exponent;
  const auto rows = opinex::experiment_core_emptiness(config, seed);
  std::ostringstream os;
  opinex::write_core_emptiness_csv(os, rows);
  write_output(g, os.str());
  const bool pass = opinex::core_emptiness_trend_holds(rows);
  std::cerr << (pass ? "PASS" : "FAIL") << " emptiness frequency trend over n=" << config.n_min << ".." << config.n_max
            << '\n';
  json freq = json::array();
  for (const auto& r : rows) {
    freq.push_back(json{{"n", r.n}, {"frequency", number(r.frequency)}, {"sampler_failures", r.sampler_failures}});
  }
  write_summary(g, json{{"command", "exp-core-emptiness"},
                        {"seed", seed},
                        {"sigma", config.sigma},
                        {"trials", config.trials},
                        {"rows", freq},
                        {"verdict", pass ? "PASS" : "FAIL"}});
  return pass ? 0 : 1;
}

int run_po_sweep(const GlobalOptions& g, const std::string& path) {
  const auto scenario = opinex::load_scenario(path, g.seed);
  const auto rows = opinex::experiment_po_sweep(scenario.setup(), scenario.po_values);
  std::ostringstream os;
  opinex::write_po_sweep_csv(os, rows);
  write_output(g, os.str());
  const bool monotone = opinex::spread_nonincreasing(rows);
  const bool nonempty = !rows.back().bayesian_core_empty;
  const bool pass = monotone && nonempty;
  std::cerr << (pass ? "PASS" : "FAIL") << " spread nonincreasing=" << (monotone ? "yes" : "no")
            << " core nonempty at largest p_o=" << (nonempty ? "yes" : "no") << '\n';
  json out = json::array();
  for (const auto& r : rows) {
    out.push_back(json{{"po", r.po}, {"spread", number(r.spread)}, {"bayesian_core_empty", r.bayesian_core_empty},
                       {"converged", r.converged}});
  }
  write_summary(g, json{{"command", "exp-po-sweep"},
                        {"scenario", path},
                        {"seed", scenario.seed},
                        {"rows", out},
                        {"verdict", pass ? "PASS" : "FAIL"}});
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coalitional games with strategic opinion exchange"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Master RNG seed (overrides the scenario's seed)");
  app.add_option("--out", g.out, "Write CSV output to this file instead of stdout");
  app.add_option("--tol", g.tol, "Tolerance for verdicts and LP feasibility")->check(CLI::PositiveNumber);
  app.add_option("--json-summary", g.json_summary, "Write a machine-readable result record to this file");

  std::string scenario_path, setfn_path, models_prefix;
  std::vector<std::string> opinion_paths;
  CoreOverrides overrides;

  auto* simulate = app.add_subcommand("simulate", "Run a scenario and emit its trace CSV");
  simulate->add_option("scenario", scenario_path, "Scenario YAML file")->required()->check(CLI::ExistingFile);
  simulate->add_option("--models", models_prefix, "Dump learned environment models to <prefix><player>.csv");

  auto* shapley = app.add_subcommand("shapley", "Shapley value of a set function");
  shapley->add_option("setfn", setfn_path, "Set function file")->required()->check(CLI::ExistingFile);

  auto* core = app.add_subcommand("core-check", "Decide whether the core of a game is empty");
  core->add_option("setfn", setfn_path, "Set function file")->required()->check(CLI::ExistingFile);

  auto* bayes = app.add_subcommand("bayesian-core", "Decide whether the Bayesian core of private opinions is empty");
  bayes->add_option("opinions", opinion_paths, "One set function file per player")->required()->check(CLI::ExistingFile);

  auto* eff = app.add_subcommand("exp-efficiency", "Average-opinion drift of all-Nash play with p_i = p_o t_i");
  eff->add_option("scenario", scenario_path, "Scenario YAML file")->required()->check(CLI::ExistingFile);

  auto* emptiness = app.add_subcommand("exp-core-emptiness", "Bayesian-core emptiness frequency versus n");
  emptiness->add_option("scenario", scenario_path, "Optional scenario YAML file")->check(CLI::ExistingFile);
  emptiness->add_option("--n-min", overrides.n_min, "Smallest player count");
  emptiness->add_option("--n-max", overrides.n_max, "Largest player count");
  emptiness->add_option("--trials", overrides.trials, "Trials per player count");
  emptiness->add_option("--sigma", overrides.sigma, "Sampling standard deviation");
  emptiness->add_option("--exponent", overrides.exponent, "Ground truth (|C|/n)^exponent");

  auto* sweep = app.add_subcommand("exp-po-sweep", "Opinion spread and Bayesian core across p_o");
  sweep->add_option("scenario", scenario_path, "Scenario YAML file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  if (*seed_opt) g.seed = seed;

  try {
    if (*simulate) return run_simulate(g, scenario_path, models_prefix);
    if (*shapley) return run_shapley(g, setfn_path);
    if (*core) return run_core_check(g, setfn_path);
    if (*bayes) return run_bayesian_core(g, opinion_paths);
    if (*eff) return run_efficiency(g, scenario_path);
    if (*emptiness) return run_core_emptiness(g, scenario_path, overrides);
    if (*sweep) return run_po_sweep(g, scenario_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
