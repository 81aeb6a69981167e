#include "opinex/core.hpp"
#include "opinex/experiments.hpp"
#include "opinex/generators.hpp"
#include "opinex/random.hpp"
#include "opinex/scenario.hpp"
#include "opinex/simulation.hpp"

#include <doctest.h>

#include <sstream>

using namespace opinex;

namespace {

const char* kTwoPlayer = R"(experiment: simulate
seed: 5
players: 2
theta: 0.1
horizon: 300
influence:
  matrix: [[0.3, 0.7], [0.4, 0.6]]
opinions:
  restricted: [[0.7, 0.1], [0.3, 0.5]]
agents:
  kind: truthful
)";

SimulationSetup random_setup(int n, std::uint64_t seed, AgentKind kind) {
  auto rng = derive_stream(seed, {99});
  SimulationSetup s;
  s.influence = random_primitive_stochastic(n, rng);
  for (int i = 0; i < n; ++i) s.initial.push_back(random_supermodular(n, rng));
  s.players.assign(static_cast<std::size_t>(n), PlayerParams{1.0, kind, {}});
  s.theta = 0.1;
  s.horizon = 200;
  s.seed = seed;
  return s;
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
  text.replace(text.find(from), from.size(), to);
  return text;
}

}  // namespace

TEST_CASE("scenario parsing resolves risk and agents") {
  const auto s = parse_scenario(kTwoPlayer, "two.yaml");
  CHECK(s.players == 2);
  CHECK(s.horizon == 300);
  CHECK(s.agents.size() == 2);
  CHECK(s.agents[1].p == doctest::Approx(7.0 / 11));
  CHECK(s.opinions[0].restricted().isApprox(Eigen::Vector2d(0.7, 0.1)));
  CHECK(parse_scenario(kTwoPlayer, "two.yaml", 77).seed == 77);
}

TEST_CASE("scenario errors cite the offending line") {
  CHECK_THROWS_WITH(parse_scenario(replace(kTwoPlayer, "theta: 0.1", "theta: 1.5"), "s.yaml"),
                    doctest::Contains("s.yaml:4:"));
  CHECK_THROWS_WITH(parse_scenario(replace(kTwoPlayer, "[0.4, 0.6]", "[0.4, 0.7]"), "s.yaml"),
                    doctest::Contains("s.yaml:7:"));
  CHECK_THROWS_WITH(parse_scenario(replace(kTwoPlayer, "horizon", "horizn"), "s.yaml"),
                    doctest::Contains("s.yaml:5:1: unknown key 'horizn'"));
  CHECK_THROWS_WITH(parse_scenario(replace(kTwoPlayer, "seed: 5\n", ""), "s.yaml"), doctest::Contains("seed"));
  CHECK_THROWS_WITH(parse_scenario(replace(kTwoPlayer, "[0.3, 0.5]]", "[0.3]]"), "s.yaml"),
                    doctest::Contains("s.yaml:9:"));
  CHECK_THROWS_WITH(parse_scenario(replace(kTwoPlayer, "truthful", "sneaky"), "s.yaml"),
                    doctest::Contains("s.yaml:11:"));
  CHECK_THROWS_AS(parse_scenario("experiment: [oops", "s.yaml"), ScenarioError);
}

TEST_CASE("random scenario parts are drawn from the seed") {
  const std::string text = R"(experiment: simulate
seed: 3
players: 4
influence: {random: {min_weight: 0.1}}
opinions: {random_supermodular: true}
agents: {kind: nash}
)";
  const auto a = parse_scenario(text);
  const auto b = parse_scenario(text);
  const auto c = parse_scenario(text, "<scenario>", 4);
  CHECK(a.influence == b.influence);
  CHECK(a.opinions[2] == b.opinions[2]);
  CHECK(a.influence != c.influence);
  for (const auto& v : a.opinions) CHECK(is_supermodular(v, true));
}

TEST_CASE("truthful agents reach consensus at the weighted initial opinion") {
  const auto trace = simulate(parse_scenario(kTwoPlayer).setup());
  const auto& last = trace.final_step();
  for (const auto& v : last.truth) {
    CHECK(v.restricted()[0] == doctest::Approx(4.9 / 11).epsilon(1e-8));
    CHECK(v.restricted()[1] == doctest::Approx(3.9 / 11).epsilon(1e-8));
  }
  CHECK(trace.converged);
}

TEST_CASE("all-Nash play with proportional risk keeps the average opinion fixed") {
  auto setup = random_setup(4, 1, AgentKind::kNash);
  assign_proportional_risk(setup, 2.0);
  const auto trace = simulate(setup);
  CHECK(max_average_drift(trace) < 1e-12);
}

TEST_CASE("a zero horizon records only the initial state") {
  auto setup = random_setup(3, 2, AgentKind::kTruthful);
  setup.horizon = 0;
  const auto trace = simulate(setup);
  REQUIRE(trace.steps.size() == 1);
  CHECK(trace.steps[0].truth[1] == setup.initial[1]);
}

TEST_CASE("trace CSV has the documented shape and round-trips") {
  auto setup = random_setup(3, 3, AgentKind::kRLearning);
  setup.stop_tolerance = 0.0;
  setup.horizon = 12;
  assign_proportional_risk(setup, 1.0);
  const auto trace = simulate(setup);
  std::stringstream ss;
  emit_trace(ss, trace);
  const std::string text = ss.str();
  const auto lines = std::count(text.begin(), text.end(), '\n');
  CHECK(lines == 1 + 13 * 3 * 6 + 13);
  CHECK(text.rfind(trace_header(3) + "\n", 0) == 0);

  const auto back = read_trace(ss);
  REQUIRE(back.steps.size() == trace.steps.size());
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    const auto& a = trace.steps[k];
    const auto& b = back.steps[k];
    CHECK(a.k == b.k);
    for (int i = 0; i < 3; ++i) {
      CHECK(a.truth[static_cast<std::size_t>(i)] == b.truth[static_cast<std::size_t>(i)]);
      CHECK(a.revealed[static_cast<std::size_t>(i)] == b.revealed[static_cast<std::size_t>(i)]);
    }
    CHECK(a.average == b.average);
    CHECK(a.shapley == b.shapley);
    CHECK(a.rewards == b.rewards);
    CHECK(a.disutility == b.disutility);
    CHECK(a.cumulative_disutility == b.cumulative_disutility);
  }

  std::stringstream again;
  emit_trace(again, simulate(setup));
  CHECK(again.str() == text);
}

TEST_CASE("an empty trace is header only") {
  SimulationTrace empty;
  empty.players = 2;
  std::stringstream ss;
  emit_trace(ss, empty);
  CHECK(ss.str() == trace_header(2) + "\n");
  CHECK(read_trace(ss).steps.empty());
}

TEST_CASE("efficiency experiment and its control") {
  const auto report = experiment_efficiency(random_setup(3, 4, AgentKind::kNash), 1.0);
  CHECK(report.pass);
  CHECK(report.drift < 1e-9);
  CHECK(report.control_applicable);
  CHECK(report.control_drift > 1e-6);

  SimulationSetup single;
  single.influence = Eigen::MatrixXd::Ones(1, 1);
  single.initial = {SetFunction::from_restricted(1, Eigen::VectorXd(0), 1.0)};
  single.players = {PlayerParams{1.0, AgentKind::kNash, {}}};
  const auto degenerate = experiment_efficiency(single, 1.0);
  CHECK(degenerate.degenerate);
  CHECK(degenerate.drift == 0.0);
  CHECK(degenerate.pass);
}

TEST_CASE("core emptiness with a shared opinion is never empty") {
  CoreEmptinessConfig cfg;
  cfg.n_max = 5;
  cfg.trials = 20;
  cfg.sigma = 0.0;
  for (const auto& row : experiment_core_emptiness(cfg, 1)) {
    CHECK(row.frequency == 0.0);
    CHECK(row.sampler_failures == 0);
  }
}

TEST_CASE("core emptiness trials are independent of execution order") {
  CoreEmptinessConfig cfg;
  cfg.n_min = 2;
  cfg.n_max = 3;
  cfg.trials = 40;
  cfg.sigma = 0.2;
  cfg.exponent = 3.0;
  const auto rows = experiment_core_emptiness(cfg, 9);
  for (const auto& row : rows) {
    GroundTruthSpec spec{power_family(row.n, cfg.exponent), std::vector<double>(static_cast<std::size_t>(row.n), cfg.sigma)};
    int empty = 0;
    for (int trial = cfg.trials - 1; trial >= 0; --trial) {
      auto rng = derive_stream(9, {kStreamCoreTrials, static_cast<std::uint64_t>(row.n), static_cast<std::uint64_t>(trial)});
      std::vector<SetFunction> opinions;
      for (int i = 0; i < row.n; ++i) opinions.push_back(sample_supermodular_opinion(spec, i, rng));
      empty += bayesian_core_is_empty(opinions);
    }
    CHECK(empty == row.empty);
  }
  CHECK(rows[0].empty > 0);
}

TEST_CASE("trend check") {
  auto rows = std::vector<CoreEmptinessRow>{{2, 10, 0, 0, 0.1}, {3, 10, 0, 0, 0.2}, {4, 10, 0, 0, 0.19},
                                            {5, 10, 0, 0, 0.3}};
  CHECK(core_emptiness_trend_holds(rows));
  rows[2].frequency = 0.1;
  CHECK_FALSE(core_emptiness_trend_holds(rows));
  rows[2].frequency = 0.19;
  rows[3].frequency = 0.1;
  CHECK_FALSE(core_emptiness_trend_holds(rows));
}

TEST_CASE("risk sweep shrinks the opinion spread") {
  auto setup = random_setup(3, 5, AgentKind::kNash);
  setup.horizon = 5000;
  const auto rows = experiment_po_sweep(setup, {0.1, 1, 10, 100});
  CHECK(spread_nonincreasing(rows));
  CHECK_FALSE(rows.back().bayesian_core_empty);
  for (const auto& r : rows) CHECK(r.converged);
  std::ostringstream os;
  write_po_sweep_csv(os, rows);
  CHECK(os.str().rfind("po,spread,bayesian_core_empty,converged,steps\n0.1,", 0) == 0);
}
