#include "opinex/agents.hpp"

#include "opinex/consensus.hpp"
#include "opinex/text.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace opinex {

std::string_view to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::kTruthful: return "truthful";
    case AgentKind::kNash: return "nash";
    case AgentKind::kRLearning: return "rlearning";
  }
  return "unknown";
}

AgentKind parse_agent_kind(std::string_view text) {
  if (text == "truthful") return AgentKind::kTruthful;
  if (text == "nash") return AgentKind::kNash;
  if (text == "rlearning") return AgentKind::kRLearning;
  throw std::invalid_argument("unknown agent kind '" + std::string(text) + "' (expected truthful, nash or rlearning)");
}

void RLearningConfig::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
  if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in (0, 1]");
  if (!(explore_std >= 0.0) || !std::isfinite(explore_std)) throw std::invalid_argument("explore_std must be >= 0");
  if (!(explore_decay > 0.0 && explore_decay <= 1.0)) throw std::invalid_argument("explore_decay must lie in (0, 1]");
  if (!(forgetting > 0.0 && forgetting <= 1.0)) throw std::invalid_argument("forgetting must lie in (0, 1]");
  if (!(prior_variance > 0.0) || !std::isfinite(prior_variance)) {
    throw std::invalid_argument("prior_variance must be positive");
  }
}

void PlayerParams::validate() const {
  if (!(p > 0.0) || !std::isfinite(p)) throw std::invalid_argument("risk aversion p must be positive");
  if (kind == AgentKind::kRLearning) rl.validate();
}

Eigen::VectorXd nash_deviation(const Eigen::VectorXd& d, double theta, double p) {
  if (!(p > 0.0)) throw std::invalid_argument("nash_deviation: p must be positive");
  return d * (theta / (2.0 * p));
}

Eigen::VectorXd nash_best_response(const Eigen::VectorXd& d, double theta, double p, double t_i,
                                   const Eigen::VectorXd& others) {
  if (!(p > 0.0)) throw std::invalid_argument("nash_best_response: p must be positive");
  if (!(t_i < 1.0)) throw std::invalid_argument("nash_best_response: needs t_i < 1");
  if (others.size() != d.size()) throw std::invalid_argument("nash_best_response: length mismatch");
  return (d * (theta / (2.0 * p)) + others) / (1.0 - t_i);
}

std::vector<Eigen::VectorXd> nash_profile(const std::vector<Eigen::VectorXd>& d, double theta,
                                          const Eigen::VectorXd& p) {
  if (static_cast<Eigen::Index>(d.size()) != p.size()) throw std::invalid_argument("nash_profile: size mismatch");
  std::vector<Eigen::VectorXd> u;
  for (std::size_t i = 0; i < d.size(); ++i) u.push_back(nash_deviation(d[i], theta, p[static_cast<Eigen::Index>(i)]));
  return u;
}

double step_reward(const std::vector<Eigen::VectorXd>& u, const Eigen::VectorXd& t, double p, double theta,
                   const Eigen::VectorXd& d) {
  return -p * deviation_disutility(u, t) + theta * d.dot(weighted_deviation(u, t));
}

double stage_cost(const std::vector<Eigen::VectorXd>& u, const Eigen::VectorXd& t, double p, double theta,
                  const Eigen::VectorXd& d) {
  return -step_reward(u, t, p, theta, d);
}

Eigen::VectorXd stage_cost_gradient(const std::vector<Eigen::VectorXd>& u, const Eigen::VectorXd& t, int player,
                                    double p, double theta, const Eigen::VectorXd& d) {
  const double ti = t[player];
  const Eigen::VectorXd mean = weighted_deviation(u, t);
  return p * (2.0 * ti * u[static_cast<std::size_t>(player)] - 2.0 * ti * mean) - theta * ti * d;
}

Eigen::VectorXd opponent_environment(const std::vector<Eigen::VectorXd>& u, const Eigen::VectorXd& t, int player) {
  const double ti = t[player];
  if (!(ti < 1.0)) throw std::invalid_argument("opponent_environment: player holds all influence");
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(u.front().size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (static_cast<int>(j) != player) acc += t[static_cast<Eigen::Index>(j)] * u[j];
  }
  return acc / (1.0 - ti);
}

EnvironmentModel::EnvironmentModel(int state_dim, int output_dim, double prior_variance, double forgetting)
    : coef_(Eigen::MatrixXd::Zero(state_dim + 1, output_dim)),
      cov_(prior_variance * Eigen::MatrixXd::Identity(state_dim + 1, state_dim + 1)),
      forgetting_(forgetting) {
  if (state_dim < 0 || output_dim < 1) throw std::invalid_argument("EnvironmentModel: bad dimensions");
  if (!(prior_variance > 0.0)) throw std::invalid_argument("EnvironmentModel: prior variance must be positive");
  if (!(forgetting > 0.0 && forgetting <= 1.0)) throw std::invalid_argument("EnvironmentModel: forgetting in (0,1]");
}

namespace {

Eigen::VectorXd features(const Eigen::VectorXd& state) {
  Eigen::VectorXd phi(state.size() + 1);
  phi[0] = 1.0;
  phi.tail(state.size()) = state;
  return phi;
}

}  // namespace

Eigen::VectorXd EnvironmentModel::predict(const Eigen::VectorXd& state) const {
  if (state.size() + 1 != coef_.rows()) throw std::invalid_argument("EnvironmentModel: state length mismatch");
  return coef_.transpose() * features(state);
}

void EnvironmentModel::observe(const Eigen::VectorXd& state, const Eigen::VectorXd& target) {
  if (target.size() != coef_.cols()) throw std::invalid_argument("EnvironmentModel: target length mismatch");
  const Eigen::VectorXd phi = features(state);
  const Eigen::VectorXd error = target - coef_.transpose() * phi;
  const Eigen::VectorXd cphi = cov_ * phi;
  const Eigen::VectorXd gain = cphi / (forgetting_ + phi.dot(cphi));
  coef_ += gain * error.transpose();
  cov_ = (cov_ - gain * cphi.transpose()) / forgetting_;
  cov_ = 0.5 * (cov_ + cov_.transpose());
  ++count_;
  residual_variance_ += (error.squaredNorm() - residual_variance_) / static_cast<double>(count_);
}

void EnvironmentModel::write_csv(std::ostream& os) const {
  os << "param,output,value\n";
  for (Eigen::Index r = 0; r < coef_.rows(); ++r) {
    const std::string name = r == 0 ? "intercept" : "s" + std::to_string(r - 1);
    for (Eigen::Index c = 0; c < coef_.cols(); ++c) os << name << ',' << c << ',' << format_double(coef_(r, c)) << '\n';
  }
  os << "residual_variance,," << format_double(residual_variance_) << '\n';
}

RLearningAgent::RLearningAgent(const AgentContext& ctx, double p, const RLearningConfig& config)
    : ctx_(ctx), p_(p), config_(config), std_(config.explore_std) {
  config_.validate();
  const int m = static_cast<int>(ctx.d.size());
  model_ = EnvironmentModel(m, m, config.prior_variance, config.forgetting);
}

Eigen::VectorXd RLearningAgent::best_response(const std::optional<Eigen::VectorXd>& state) const {
  const double ti = ctx_.t[ctx_.player];
  const Eigen::VectorXd mean_others = state ? model_.predict(*state) : model_.intercept();
  return nash_best_response(ctx_.d, ctx_.theta, p_, ti, (1.0 - ti) * mean_others);
}

Eigen::VectorXd RLearningAgent::act(const std::optional<Eigen::VectorXd>& state, std::mt19937_64& rng) {
  Eigen::VectorXd u = best_response(state);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng) < config_.gamma) {
    mode_ = kExploit;
  } else {
    mode_ = kExplore;
    if (std_ > 0.0) {
      std::normal_distribution<double> noise(0.0, std_);
      for (Eigen::Index k = 0; k < u.size(); ++k) u[k] += noise(rng);
    }
  }
  std_ *= config_.explore_decay;
  return u;
}

void RLearningAgent::observe(const StepFeedback& feedback) {
  if (feedback.state) model_.observe(*feedback.state, feedback.environment);
  // Single-state R-learning over the two behaviour modes.
  const double best = std::max(q_[kExploit], q_[kExplore]);
  q_[mode_] += config_.alpha * (feedback.reward - rho_ + best - q_[mode_]);
  if (mode_ == kExploit) rho_ += config_.beta * (feedback.reward - rho_);
}

std::unique_ptr<Agent> make_agent(const PlayerParams& params, const AgentContext& ctx) {
  params.validate();
  switch (params.kind) {
    case AgentKind::kTruthful: return std::make_unique<TruthfulAgent>(static_cast<int>(ctx.d.size()));
    case AgentKind::kNash: return std::make_unique<NashAgent>(ctx, params.p);
    case AgentKind::kRLearning: return std::make_unique<RLearningAgent>(ctx, params.p, params.rl);
  }
  throw std::invalid_argument("make_agent: unknown agent kind");
}

}  // namespace opinex
