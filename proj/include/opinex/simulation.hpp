#ifndef OPINEX_SIMULATION_HPP
#define OPINEX_SIMULATION_HPP

#include "opinex/agents.hpp"
#include "opinex/consensus.hpp"
#include "opinex/setfn.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace opinex {

/// A fully resolved run: concrete W, initial opinions and per-player parameters.
struct SimulationSetup {
  Eigen::MatrixXd influence;
  std::vector<SetFunction> initial;
  std::vector<PlayerParams> players;
  double theta = 0.1;
  int horizon = 100;
  double stop_tolerance = 1e-10;  // 0 disables early stopping
  std::uint64_t seed = 0;

  int size() const { return static_cast<int>(initial.size()); }
  void validate() const;
};

struct TraceStep {
  int k = 0;
  std::vector<SetFunction> truth;     // v_i[k]
  std::vector<SetFunction> revealed;  // x_i[k]
  SetFunction average;                // A[v[k]]
  Eigen::VectorXd shapley;            // Shapley value of A[v[k]]
  double disutility = 0.0;            // 1^T var[u[k]]
  double cumulative_disutility = 0.0;
  Eigen::VectorXd rewards;            // r_i[k]

  std::vector<Eigen::VectorXd> deviations() const;
};

struct SimulationTrace {
  int players = 0;
  std::vector<TraceStep> steps;
  bool converged = false;  // stopped early on the step-change criterion
  std::vector<std::optional<EnvironmentModel>> models;  // final learned models of R-learning players

  const TraceStep& final_step() const { return steps.back(); }
};

/// Agents act at every recorded step; the strategic update then advances the true
/// opinions, until the horizon or until max_i ||v_i[k] - v_i[k-1]||_inf < stop_tolerance.
SimulationTrace simulate(const SimulationSetup& setup);

/// p_i = p_o t_i for every player, with t the influence weights of setup.influence.
void assign_proportional_risk(SimulationSetup& setup, double po);

/// max_k ||A[v[k]] - A[v[0]]||_inf.
double max_average_drift(const SimulationTrace& trace);
/// max over k > burn_in of ||phi(A[v[k]]) - phi(A[v[k-1]])||_inf.
double max_shapley_drift(const SimulationTrace& trace, int burn_in);
/// max_i ||v_i[k] - v_i[k-1]||_inf at step k (k >= 1 and recorded).
double step_change(const SimulationTrace& trace, int k);
/// max_i ||v_i - A[v]||_inf at the final recorded step.
double opinion_spread(const SimulationTrace& trace);

/// Unified CSV. Opinion rows: one per (k, player, restricted entry). Aggregate rows:
/// one per k with disutility, the average opinion, its Shapley value, rewards and v_i(N).
void emit_trace(std::ostream& os, const SimulationTrace& trace);
void emit_trace(const std::string& path, const SimulationTrace& trace);
SimulationTrace read_trace(std::istream& is, const std::string& source = "<stream>");
std::string trace_header(int n);

}  // namespace opinex

#endif  // OPINEX_SIMULATION_HPP
