#include "opinex/simulation.hpp"

#include "opinex/random.hpp"
#include "opinex/shapley.hpp"

#include <algorithm>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

namespace opinex {

void SimulationSetup::validate() const {
  const int n = size();
  if (n < 1) throw std::invalid_argument("simulation needs at least one player");
  if (influence.rows() != n || influence.cols() != n) {
    throw std::invalid_argument("influence matrix must be " + std::to_string(n) + "x" + std::to_string(n));
  }
  check_stochastic(influence);
  if (static_cast<int>(players.size()) != n) throw std::invalid_argument("need one PlayerParams per player");
  for (const auto& v : initial) {
    if (v.players() != n) throw std::invalid_argument("initial opinions must be set functions over the n players");
  }
  for (const auto& p : players) p.validate();
  ConsensusParams{theta, horizon}.validate();
  if (!(stop_tolerance >= 0.0)) throw std::invalid_argument("stop_tolerance must be nonnegative");
}

std::vector<Eigen::VectorXd> TraceStep::deviations() const {
  std::vector<Eigen::VectorXd> u;
  for (std::size_t i = 0; i < truth.size(); ++i) u.push_back(revealed[i].restricted() - truth[i].restricted());
  return u;
}

SimulationTrace simulate(const SimulationSetup& setup) {
  setup.validate();
  const int n = setup.size();
  const auto w = InfluenceMatrix::from_rows(setup.influence);
  const Eigen::VectorXd& t = w.weights();
  const auto m = static_cast<Eigen::Index>(restricted_size(n));

  std::vector<Eigen::VectorXd> d(static_cast<std::size_t>(n), Eigen::VectorXd::Zero(m));
  if (n >= 2) d = shapley_linear_form(n).rows;

  std::vector<std::unique_ptr<Agent>> agents;
  std::vector<std::mt19937_64> streams;
  for (int i = 0; i < n; ++i) {
    AgentContext ctx{i, setup.theta, t, d[static_cast<std::size_t>(i)]};
    agents.push_back(make_agent(setup.players[static_cast<std::size_t>(i)], ctx));
    streams.push_back(derive_stream(setup.seed, {kStreamAgents, static_cast<std::uint64_t>(i)}));
  }

  SimulationTrace trace;
  trace.players = n;
  auto profile = OpinionProfile::initial(setup.initial);
  std::optional<Eigen::VectorXd> state;
  double cumulative = 0.0;
  bool stop = false;
  for (int k = 0;; ++k) {
    std::vector<Eigen::VectorXd> u;
    for (int i = 0; i < n; ++i) u.push_back(agents[static_cast<std::size_t>(i)]->act(state, streams[static_cast<std::size_t>(i)]));
    profile.reveal(u);

    TraceStep step;
    step.k = k;
    step.truth = profile.truth;
    step.revealed = profile.revealed;
    step.average = average_opinion(profile, t);
    step.shapley = shapley_value(step.average).payoffs;
    step.disutility = deviation_disutility(u, t);
    cumulative += step.disutility;
    step.cumulative_disutility = cumulative;
    step.rewards.resize(n);
    for (int i = 0; i < n; ++i) {
      step.rewards[i] = step_reward(u, t, setup.players[static_cast<std::size_t>(i)].p, setup.theta,
                                    d[static_cast<std::size_t>(i)]);
    }

    for (int i = 0; i < n; ++i) {
      StepFeedback fb;
      fb.state = state;
      fb.own_deviation = u[static_cast<std::size_t>(i)];
      fb.environment = n >= 2 ? opponent_environment(u, t, i) : Eigen::VectorXd::Zero(m);
      fb.reward = step.rewards[i];
      agents[static_cast<std::size_t>(i)]->observe(fb);
    }
    trace.steps.push_back(std::move(step));

    if (stop || k >= setup.horizon) break;
    state = average_revealed(profile, t).restricted();
    auto next = step_strategic(profile, w, setup.theta);
    const double change = max_opinion_change(next.truth, profile.truth);
    profile = std::move(next);
    if (setup.stop_tolerance > 0.0 && change < setup.stop_tolerance) {
      stop = true;
      trace.converged = true;
    }
  }
  for (const auto& agent : agents) {
    const auto* learner = dynamic_cast<const RLearningAgent*>(agent.get());
    trace.models.push_back(learner ? std::optional<EnvironmentModel>(learner->model()) : std::nullopt);
  }
  return trace;
}

void assign_proportional_risk(SimulationSetup& setup, double po) {
  if (!(po > 0.0)) throw std::invalid_argument("p_o must be positive");
  const Eigen::VectorXd t = influence_weights(setup.influence);
  for (int i = 0; i < setup.size(); ++i) setup.players[static_cast<std::size_t>(i)].p = po * t[i];
}

double max_average_drift(const SimulationTrace& trace) {
  double drift = 0.0;
  if (trace.steps.empty()) return drift;
  const Eigen::VectorXd& base = trace.steps.front().average.values();
  for (const auto& s : trace.steps) drift = std::max(drift, (s.average.values() - base).cwiseAbs().maxCoeff());
  return drift;
}

double max_shapley_drift(const SimulationTrace& trace, int burn_in) {
  double drift = 0.0;
  for (std::size_t k = 1; k < trace.steps.size(); ++k) {
    if (trace.steps[k].k <= burn_in) continue;
    drift = std::max(drift, (trace.steps[k].shapley - trace.steps[k - 1].shapley).cwiseAbs().maxCoeff());
  }
  return drift;
}

double step_change(const SimulationTrace& trace, int k) {
  if (k < 1 || k >= static_cast<int>(trace.steps.size())) {
    throw std::out_of_range("step_change: step " + std::to_string(k) + " not recorded");
  }
  return max_opinion_change(trace.steps[static_cast<std::size_t>(k)].truth,
                            trace.steps[static_cast<std::size_t>(k) - 1].truth);
}

double opinion_spread(const SimulationTrace& trace) {
  const auto& s = trace.final_step();
  double spread = 0.0;
  for (const auto& v : s.truth) spread = std::max(spread, (v.values() - s.average.values()).cwiseAbs().maxCoeff());
  return spread;
}

}  // namespace opinex
