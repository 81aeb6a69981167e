#ifndef OPINEX_EXPERIMENTS_HPP
#define OPINEX_EXPERIMENTS_HPP

#include "opinex/simulation.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace opinex {

struct EfficiencyReport {
  double drift = 0.0;          // max_k ||A[v[k]] - A[v[0]]||_inf with p_i = p_o t_i
  bool pass = false;           // drift < tolerance
  double control_drift = 0.0;  // same run with equal p_i
  bool control_applicable = false;  // false when t is uniform (equal p_i is then proportional)
  bool degenerate = false;     // a single player
  int steps = 0;
  double tolerance = 1e-9;
};

/// All-Nash run with p_i = p_o t_i plus an equal-p control.
EfficiencyReport experiment_efficiency(const SimulationSetup& base, double po, double tol = 1e-9);

struct CoreEmptinessConfig {
  int n_min = 2;
  int n_max = 8;
  int trials = 500;
  double sigma = 0.005;     // same for every player
  double exponent = 2.0;    // ground truth (|C|/n)^exponent
  std::size_t max_attempts = 100000;
  bool perturb_grand = true;

  void validate() const;
};

struct CoreEmptinessRow {
  int n = 0;
  int trials = 0;
  int empty = 0;
  int sampler_failures = 0;
  double frequency = 0.0;  // empty / (trials - sampler_failures); NaN when every trial failed
};

/// Trial (n, j) draws all opinions from the stream derived from (seed, n, j).
std::vector<CoreEmptinessRow> experiment_core_emptiness(const CoreEmptinessConfig& config, std::uint64_t seed);
void write_core_emptiness_csv(std::ostream& os, const std::vector<CoreEmptinessRow>& rows);

/// Last frequency strictly above the first, and at most one decrease, of at most `allowance`.
bool core_emptiness_trend_holds(const std::vector<CoreEmptinessRow>& rows, double allowance = 0.02);

struct PoSweepRow {
  double po = 0.0;
  double spread = 0.0;  // max_i ||v_i[inf] - A[v[inf]]||_inf
  bool bayesian_core_empty = true;
  bool converged = false;
  int steps = 0;
};

/// All-Nash runs with p_i = p_o t_i for each p_o, each to convergence or the horizon.
std::vector<PoSweepRow> experiment_po_sweep(const SimulationSetup& base, const std::vector<double>& po_values);
void write_po_sweep_csv(std::ostream& os, const std::vector<PoSweepRow>& rows);

/// Every consecutive spread ratio is at most 1 + rel_tol (rows in increasing p_o order).
bool spread_nonincreasing(const std::vector<PoSweepRow>& rows, double rel_tol = 1e-9);

}  // namespace opinex

#endif  // OPINEX_EXPERIMENTS_HPP
