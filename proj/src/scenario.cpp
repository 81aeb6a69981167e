#include "opinex/scenario.hpp"

#include "opinex/generators.hpp"
#include "opinex/random.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace opinex {

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kSimulate: return "simulate";
    case ExperimentKind::kEfficiency: return "efficiency";
    case ExperimentKind::kCoreEmptiness: return "core-emptiness";
    case ExperimentKind::kPoSweep: return "po-sweep";
  }
  return "unknown";
}

namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& message) const {
    const auto mark = node.Mark();
    if (mark.line < 0) throw ScenarioError(source_ + ": " + message);
    throw ScenarioError(source_ + ":" + std::to_string(mark.line + 1) + ":" + std::to_string(mark.column + 1) + ": " +
                        message);
  }

  void expect_map(const YAML::Node& node, const std::string& what) const {
    if (!node.IsMap()) fail(node, what + " must be a mapping");
  }

  void allow_keys(const YAML::Node& node, std::initializer_list<const char*> keys) const {
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) fail(kv.first, "unknown key '" + key + "'");
    }
  }

  double number(const YAML::Node& node, const std::string& what) const {
    if (!node.IsScalar()) fail(node, what + " must be a number");
    try {
      const double x = node.as<double>();
      if (!std::isfinite(x)) fail(node, what + " must be finite");
      return x;
    } catch (const YAML::BadConversion&) {
      fail(node, what + " must be a number, got '" + node.Scalar() + "'");
    }
  }

  long long integer(const YAML::Node& node, const std::string& what) const {
    if (!node.IsScalar()) fail(node, what + " must be an integer");
    try {
      return node.as<long long>();
    } catch (const YAML::BadConversion&) {
      fail(node, what + " must be an integer, got '" + node.Scalar() + "'");
    }
  }

  std::string text(const YAML::Node& node, const std::string& what) const {
    if (!node.IsScalar()) fail(node, what + " must be a string");
    return node.Scalar();
  }

  std::vector<double> numbers(const YAML::Node& node, const std::string& what) const {
    if (!node.IsSequence()) fail(node, what + " must be a list of numbers");
    std::vector<double> out;
    for (const auto& x : node) out.push_back(number(x, what));
    return out;
  }

  double number_or(const YAML::Node& map, const char* key, double fallback) const {
    const auto node = map[key];
    return node ? number(node, key) : fallback;
  }

 private:
  std::string source_;
};

ExperimentKind parse_experiment(const Reader& r, const YAML::Node& node) {
  const auto s = r.text(node, "experiment");
  for (auto kind : {ExperimentKind::kSimulate, ExperimentKind::kEfficiency, ExperimentKind::kCoreEmptiness,
                    ExperimentKind::kPoSweep}) {
    if (s == to_string(kind)) return kind;
  }
  r.fail(node, "unknown experiment '" + s + "' (expected simulate, efficiency, core-emptiness or po-sweep)");
}

Eigen::MatrixXd parse_influence(const Reader& r, const YAML::Node& node, int n, std::uint64_t seed) {
  r.expect_map(node, "influence");
  r.allow_keys(node, {"matrix", "random"});
  if (node["matrix"] && node["random"]) r.fail(node, "influence takes either 'matrix' or 'random', not both");
  if (const auto m = node["matrix"]) {
    if (!m.IsSequence() || static_cast<int>(m.size()) != n) r.fail(m, "influence matrix must have " + std::to_string(n) + " rows");
    Eigen::MatrixXd w(n, n);
    for (int i = 0; i < n; ++i) {
      const auto row = r.numbers(m[i], "influence row");
      if (static_cast<int>(row.size()) != n) r.fail(m[i], "influence row must have " + std::to_string(n) + " entries");
      for (int j = 0; j < n; ++j) w(i, j) = row[static_cast<std::size_t>(j)];
    }
    try {
      check_stochastic(w);
      influence_weights(w);
    } catch (const std::exception& e) {
      r.fail(m, e.what());
    }
    return w;
  }
  if (const auto rnd = node["random"]) {
    double min_weight = 0.05;
    if (rnd.IsMap()) {
      r.allow_keys(rnd, {"min_weight"});
      min_weight = r.number_or(rnd, "min_weight", min_weight);
    } else if (!rnd.IsNull() && !(rnd.IsScalar() && rnd.Scalar() == "true")) {
      r.fail(rnd, "random must be 'true' or a mapping");
    }
    if (!(min_weight > 0.0 && min_weight <= 1.0)) r.fail(rnd, "min_weight must lie in (0, 1]");
    auto rng = derive_stream(seed, {kStreamInfluence});
    return random_primitive_stochastic(n, rng, min_weight);
  }
  r.fail(node, "influence needs 'matrix' or 'random'");
}

std::vector<SetFunction> parse_opinions(const Reader& r, const YAML::Node& node, int n, std::uint64_t seed) {
  r.expect_map(node, "opinions");
  r.allow_keys(node, {"restricted", "grand", "random_supermodular", "ground_truth"});
  const int forms = (node["restricted"] ? 1 : 0) + (node["random_supermodular"] ? 1 : 0) + (node["ground_truth"] ? 1 : 0);
  if (forms != 1) r.fail(node, "opinions take exactly one of 'restricted', 'random_supermodular', 'ground_truth'");
  const auto m = restricted_size(n);
  std::vector<SetFunction> out;
  if (const auto rows = node["restricted"]) {
    const double grand = r.number_or(node, "grand", 1.0);
    if (!rows.IsSequence() || static_cast<int>(rows.size()) != n) {
      r.fail(rows, "restricted opinions need one row per player (" + std::to_string(n) + ")");
    }
    for (int i = 0; i < n; ++i) {
      const auto values = r.numbers(rows[i], "opinion entry");
      if (values.size() != m) r.fail(rows[i], "each opinion needs " + std::to_string(m) + " restricted entries");
      out.push_back(SetFunction::from_restricted(n, Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(m)), grand));
    }
    return out;
  }
  auto rng = derive_stream(seed, {kStreamOpinions});
  if (const auto rs = node["random_supermodular"]) {
    if (!rs.IsNull() && !(rs.IsScalar() && rs.Scalar() == "true") && !(rs.IsMap() && rs.size() == 0)) {
      r.fail(rs, "random_supermodular takes no options");
    }
    for (int i = 0; i < n; ++i) out.push_back(random_supermodular(n, rng));
    return out;
  }
  const auto gt = node["ground_truth"];
  r.expect_map(gt, "ground_truth");
  r.allow_keys(gt, {"exponent", "sigma", "max_attempts"});
  const double exponent = r.number_or(gt, "exponent", 2.0);
  const double sigma = r.number_or(gt, "sigma", 0.01);
  if (!(exponent > 1.0)) r.fail(gt, "exponent must exceed 1");
  if (!(sigma >= 0.0)) r.fail(gt, "sigma must be nonnegative");
  SamplerOptions options{false, 100000};
  if (gt["max_attempts"]) options.max_attempts = static_cast<std::size_t>(r.integer(gt["max_attempts"], "max_attempts"));
  GroundTruthSpec spec{power_family(n, exponent), std::vector<double>(static_cast<std::size_t>(n), sigma)};
  try {
    spec.validate();
    for (int i = 0; i < n; ++i) out.push_back(sample_supermodular_opinion(spec, i, rng, options));
  } catch (const std::exception& e) {
    r.fail(gt, e.what());
  }
  return out;
}

PlayerParams parse_agent(const Reader& r, const YAML::Node& node) {
  r.expect_map(node, "agent");
  r.allow_keys(node, {"kind", "p", "gamma", "alpha", "beta", "explore_std", "explore_decay", "forgetting",
                      "prior_variance"});
  PlayerParams p;
  if (node["kind"]) {
    try {
      p.kind = parse_agent_kind(r.text(node["kind"], "kind"));
    } catch (const std::invalid_argument& e) {
      r.fail(node["kind"], e.what());
    }
  }
  p.p = r.number_or(node, "p", 0.0);
  auto& rl = p.rl;
  rl.gamma = r.number_or(node, "gamma", rl.gamma);
  rl.alpha = r.number_or(node, "alpha", rl.alpha);
  rl.beta = r.number_or(node, "beta", rl.beta);
  rl.explore_std = r.number_or(node, "explore_std", rl.explore_std);
  rl.explore_decay = r.number_or(node, "explore_decay", rl.explore_decay);
  rl.forgetting = r.number_or(node, "forgetting", rl.forgetting);
  rl.prior_variance = r.number_or(node, "prior_variance", rl.prior_variance);
  if (p.kind == AgentKind::kRLearning) {
    try {
      rl.validate();
    } catch (const std::invalid_argument& e) {
      r.fail(node, e.what());
    }
  }
  return p;
}

void parse_core(const Reader& r, const YAML::Node& node, CoreEmptinessConfig& c) {
  r.expect_map(node, "core_emptiness");
  r.allow_keys(node, {"n_min", "n_max", "trials", "sigma", "exponent", "max_attempts", "perturb_grand"});
  if (node["n_min"]) c.n_min = static_cast<int>(r.integer(node["n_min"], "n_min"));
  if (node["n_max"]) c.n_max = static_cast<int>(r.integer(node["n_max"], "n_max"));
  if (node["trials"]) c.trials = static_cast<int>(r.integer(node["trials"], "trials"));
  if (node["max_attempts"]) c.max_attempts = static_cast<std::size_t>(r.integer(node["max_attempts"], "max_attempts"));
  c.sigma = r.number_or(node, "sigma", c.sigma);
  c.exponent = r.number_or(node, "exponent", c.exponent);
  if (node["perturb_grand"]) {
    try {
      c.perturb_grand = node["perturb_grand"].as<bool>();
    } catch (const YAML::BadConversion&) {
      r.fail(node["perturb_grand"], "perturb_grand must be true or false");
    }
  }
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    r.fail(node, e.what());
  }
}

}  // namespace

SimulationSetup Scenario::setup() const {
  SimulationSetup s;
  s.influence = influence;
  s.initial = opinions;
  s.players = agents;
  s.theta = theta;
  s.horizon = horizon;
  s.stop_tolerance = stop_tolerance;
  s.seed = seed;
  return s;
}

Scenario parse_scenario(const std::string& text, const std::string& source, std::optional<std::uint64_t> seed_override) {
  const Reader r(source);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ScenarioError(source + ":" + std::to_string(e.mark.line + 1) + ":" + std::to_string(e.mark.column + 1) +
                        ": " + e.msg);
  }
  if (!root.IsMap()) throw ScenarioError(source + ": scenario must be a mapping");
  r.allow_keys(root, {"name", "experiment", "seed", "players", "theta", "horizon", "stop_tolerance", "influence",
                      "opinions", "risk", "agents", "sweep", "core_emptiness"});

  Scenario s;
  s.source = source;
  if (!root["experiment"]) r.fail(root, "missing required key 'experiment'");
  s.experiment = parse_experiment(r, root["experiment"]);
  if (!root["seed"]) r.fail(root, "missing required key 'seed' (runs must be reproducible)");
  const auto seed = r.integer(root["seed"], "seed");
  if (seed < 0) r.fail(root["seed"], "seed must be nonnegative");
  s.seed = seed_override.value_or(static_cast<std::uint64_t>(seed));
  if (root["name"]) s.name = r.text(root["name"], "name");

  if (s.experiment == ExperimentKind::kCoreEmptiness) {
    if (root["core_emptiness"]) parse_core(r, root["core_emptiness"], s.core);
    return s;
  }

  if (!root["players"]) r.fail(root, "missing required key 'players'");
  const auto n = r.integer(root["players"], "players");
  if (n < 1 || n > 12) r.fail(root["players"], "players must lie in [1, 12]");
  s.players = static_cast<int>(n);
  s.theta = r.number_or(root, "theta", s.theta);
  if (!(s.theta > 0.0 && s.theta < 1.0)) r.fail(root["theta"], "theta must lie strictly between 0 and 1");
  if (root["horizon"]) s.horizon = static_cast<int>(r.integer(root["horizon"], "horizon"));
  if (s.horizon < 0) r.fail(root["horizon"], "horizon must be nonnegative");
  s.stop_tolerance = r.number_or(root, "stop_tolerance", s.stop_tolerance);
  if (!(s.stop_tolerance >= 0.0)) r.fail(root["stop_tolerance"], "stop_tolerance must be nonnegative");

  if (!root["influence"]) r.fail(root, "missing required key 'influence'");
  s.influence = parse_influence(r, root["influence"], s.players, s.seed);
  if (!root["opinions"]) r.fail(root, "missing required key 'opinions'");
  s.opinions = parse_opinions(r, root["opinions"], s.players, s.seed);

  const auto agents = root["agents"];
  if (!agents || agents.IsMap()) {
    const PlayerParams common = agents ? parse_agent(r, agents) : PlayerParams{};
    s.agents.assign(static_cast<std::size_t>(s.players), common);
  } else if (agents.IsSequence()) {
    if (static_cast<int>(agents.size()) != s.players) r.fail(agents, "agents list needs one entry per player");
    for (const auto& a : agents) s.agents.push_back(parse_agent(r, a));
  } else {
    r.fail(agents, "agents must be a mapping or a list of mappings");
  }

  const Eigen::VectorXd t = influence_weights(s.influence);
  const auto risk = root["risk"];
  if (risk) {
    r.expect_map(risk, "risk");
    r.allow_keys(risk, {"scale", "values"});
    if (risk["scale"] && risk["values"]) r.fail(risk, "risk takes either 'scale' or 'values'");
    if (risk["scale"]) {
      const double scale = r.number(risk["scale"], "scale");
      if (!(scale > 0.0)) r.fail(risk["scale"], "scale must be positive");
      s.risk_scale = scale;
    } else if (risk["values"]) {
      const auto values = r.numbers(risk["values"], "risk value");
      if (static_cast<int>(values.size()) != s.players) r.fail(risk["values"], "risk values need one entry per player");
      for (int i = 0; i < s.players; ++i) s.agents[static_cast<std::size_t>(i)].p = values[static_cast<std::size_t>(i)];
    }
  } else {
    bool explicit_p = false;
    for (const auto& a : s.agents) explicit_p = explicit_p || a.p > 0.0;
    if (!explicit_p) s.risk_scale = 1.0;
  }
  if (s.risk_scale) {
    for (int i = 0; i < s.players; ++i) s.agents[static_cast<std::size_t>(i)].p = *s.risk_scale * t[i];
  }
  for (int i = 0; i < s.players; ++i) {
    if (!(s.agents[static_cast<std::size_t>(i)].p > 0.0)) {
      r.fail(agents ? agents : root, "player " + std::to_string(i) + " has no positive risk aversion p");
    }
  }

  if (const auto sweep = root["sweep"]) {
    r.expect_map(sweep, "sweep");
    r.allow_keys(sweep, {"po"});
    if (sweep["po"]) s.po_values = r.numbers(sweep["po"], "p_o value");
    for (double po : s.po_values) {
      if (!(po > 0.0)) r.fail(sweep["po"], "p_o values must be positive");
    }
  }
  if (s.experiment == ExperimentKind::kPoSweep && s.po_values.empty()) {
    r.fail(root, "po-sweep needs 'sweep: {po: [...]}'");
  }
  return s;
}

Scenario load_scenario(const std::string& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path + ": cannot open scenario file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str(), path, seed_override);
}

}  // namespace opinex
