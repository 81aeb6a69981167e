#ifndef OPINEX_SCENARIO_HPP
#define OPINEX_SCENARIO_HPP

#include "opinex/experiments.hpp"
#include "opinex/simulation.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace opinex {

enum class ExperimentKind { kSimulate, kEfficiency, kCoreEmptiness, kPoSweep };

std::string_view to_string(ExperimentKind kind);

/// Validation failure; the message starts with "file:line:column:".
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A scenario file with every random choice already resolved from its seed.
struct Scenario {
  std::string source;
  std::string name;
  ExperimentKind experiment = ExperimentKind::kSimulate;
  std::uint64_t seed = 0;
  int players = 0;
  double theta = 0.1;
  int horizon = 100;
  double stop_tolerance = 1e-10;
  Eigen::MatrixXd influence;
  std::vector<SetFunction> opinions;
  std::optional<double> risk_scale;  // p_i = scale * t_i when set
  std::vector<PlayerParams> agents;  // p already resolved
  std::vector<double> po_values;
  CoreEmptinessConfig core;

  SimulationSetup setup() const;
};

Scenario parse_scenario(const std::string& text, const std::string& source = "<scenario>",
                        std::optional<std::uint64_t> seed_override = std::nullopt);
Scenario load_scenario(const std::string& path, std::optional<std::uint64_t> seed_override = std::nullopt);

}  // namespace opinex

#endif  // OPINEX_SCENARIO_HPP
