#include "opinex/experiments.hpp"

#include "opinex/core.hpp"
#include "opinex/random.hpp"
#include "opinex/text.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace opinex {

namespace {

SimulationSetup all_nash(const SimulationSetup& base) {
  SimulationSetup s = base;
  for (auto& p : s.players) p.kind = AgentKind::kNash;
  return s;
}

}  // namespace

EfficiencyReport experiment_efficiency(const SimulationSetup& base, double po, double tol) {
  EfficiencyReport report;
  report.tolerance = tol;
  SimulationSetup s = all_nash(base);
  if (s.size() == 1) {
    report.degenerate = true;
    const auto trace = simulate(s);
    report.drift = max_average_drift(trace);
    report.steps = static_cast<int>(trace.steps.size()) - 1;
    report.pass = report.drift < tol;
    return report;
  }
  assign_proportional_risk(s, po);
  const auto trace = simulate(s);
  report.drift = max_average_drift(trace);
  report.steps = static_cast<int>(trace.steps.size()) - 1;
  report.pass = report.drift < tol;

  const Eigen::VectorXd t = influence_weights(s.influence);
  report.control_applicable = (t.array() - t.mean()).abs().maxCoeff() > 1e-9;
  SimulationSetup control = s;
  for (auto& p : control.players) p.p = po / control.size();
  report.control_drift = max_average_drift(simulate(control));
  return report;
}

void CoreEmptinessConfig::validate() const {
  if (n_min < 2 || n_max < n_min || n_max > 12) throw std::invalid_argument("core_emptiness: need 2 <= n_min <= n_max <= 12");
  if (trials < 1) throw std::invalid_argument("core_emptiness: trials must be positive");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("core_emptiness: sigma must be >= 0");
  if (!(exponent > 1.0)) throw std::invalid_argument("core_emptiness: exponent must exceed 1 for a strictly supermodular truth");
  if (max_attempts < 1) throw std::invalid_argument("core_emptiness: max_attempts must be positive");
}

std::vector<CoreEmptinessRow> experiment_core_emptiness(const CoreEmptinessConfig& config, std::uint64_t seed) {
  config.validate();
  std::vector<CoreEmptinessRow> rows;
  const SamplerOptions options{config.perturb_grand, config.max_attempts};
  for (int n = config.n_min; n <= config.n_max; ++n) {
    GroundTruthSpec spec{power_family(n, config.exponent), std::vector<double>(static_cast<std::size_t>(n), config.sigma)};
    spec.validate();
    CoreEmptinessRow row;
    row.n = n;
    row.trials = config.trials;
    for (int trial = 0; trial < config.trials; ++trial) {
      auto rng = derive_stream(seed, {kStreamCoreTrials, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(trial)});
      std::vector<SetFunction> opinions;
      try {
        for (int i = 0; i < n; ++i) opinions.push_back(sample_supermodular_opinion(spec, i, rng, options));
      } catch (const SamplerExhausted&) {
        ++row.sampler_failures;
        continue;
      }
      if (bayesian_core_is_empty(opinions)) ++row.empty;
    }
    const int valid = row.trials - row.sampler_failures;
    row.frequency = valid > 0 ? static_cast<double>(row.empty) / valid : std::numeric_limits<double>::quiet_NaN();
    rows.push_back(row);
  }
  return rows;
}

void write_core_emptiness_csv(std::ostream& os, const std::vector<CoreEmptinessRow>& rows) {
  os << "n,trials,empty,sampler_failures,frequency\n";
  for (const auto& r : rows) {
    os << r.n << ',' << r.trials << ',' << r.empty << ',' << r.sampler_failures << ','
       << (std::isnan(r.frequency) ? std::string("nan") : format_double(r.frequency)) << '\n';
  }
}

bool core_emptiness_trend_holds(const std::vector<CoreEmptinessRow>& rows, double allowance) {
  if (rows.size() < 2) return false;
  for (const auto& r : rows) {
    if (std::isnan(r.frequency)) return false;
  }
  if (!(rows.back().frequency > rows.front().frequency)) return false;
  int inversions = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double drop = rows[i - 1].frequency - rows[i].frequency;
    if (drop > 0.0) {
      if (drop > allowance) return false;
      ++inversions;
    }
  }
  return inversions <= 1;
}

std::vector<PoSweepRow> experiment_po_sweep(const SimulationSetup& base, const std::vector<double>& po_values) {
  if (po_values.empty()) throw std::invalid_argument("po sweep needs at least one p_o value");
  std::vector<PoSweepRow> rows;
  for (double po : po_values) {
    SimulationSetup s = all_nash(base);
    assign_proportional_risk(s, po);
    const auto trace = simulate(s);
    PoSweepRow row;
    row.po = po;
    row.spread = opinion_spread(trace);
    row.bayesian_core_empty = bayesian_core_is_empty(trace.final_step().truth);
    row.converged = trace.converged;
    row.steps = static_cast<int>(trace.steps.size()) - 1;
    rows.push_back(row);
  }
  return rows;
}

void write_po_sweep_csv(std::ostream& os, const std::vector<PoSweepRow>& rows) {
  os << "po,spread,bayesian_core_empty,converged,steps\n";
  for (const auto& r : rows) {
    os << format_double(r.po) << ',' << format_double(r.spread) << ',' << (r.bayesian_core_empty ? 1 : 0) << ','
       << (r.converged ? 1 : 0) << ',' << r.steps << '\n';
  }
}

bool spread_nonincreasing(const std::vector<PoSweepRow>& rows, double rel_tol) {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].spread > rows[i - 1].spread * (1.0 + rel_tol)) return false;
  }
  return true;
}

}  // namespace opinex
