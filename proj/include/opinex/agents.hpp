#ifndef OPINEX_AGENTS_HPP
#define OPINEX_AGENTS_HPP

#include <Eigen/Core>

#include <iosfwd>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace opinex {

enum class AgentKind { kTruthful, kNash, kRLearning };

std::string_view to_string(AgentKind kind);
AgentKind parse_agent_kind(std::string_view text);

struct RLearningConfig {
  double gamma = 0.5;            // probability of playing the current best response
  double alpha = 0.1;            // action-value step size
  double beta = 0.01;            // average-reward step size
  double explore_std = 0.05;     // std of the Gaussian exploration perturbation
  double explore_decay = 1.0;    // std multiplier applied after every act
  double forgetting = 1.0;       // RLS forgetting factor in (0, 1]
  double prior_variance = 1.0;   // RLS initial covariance scale

  void validate() const;
};

struct PlayerParams {
  double p = 1.0;  // risk aversion
  AgentKind kind = AgentKind::kTruthful;
  RLearningConfig rl;

  void validate() const;
};

/// u_i = d_i theta / (2 p_i).
Eigen::VectorXd nash_deviation(const Eigen::VectorXd& d, double theta, double p);

/// Solves 2p_i(t_i u_i - t_i sum_j t_j u_j) = t_i d_i theta for u_i given
/// others = sum_{j != i} t_j u_j. Throws when t_i >= 1.
Eigen::VectorXd nash_best_response(const Eigen::VectorXd& d, double theta, double p, double t_i,
                                   const Eigen::VectorXd& others);

/// Every player at the closed-form equilibrium deviation.
std::vector<Eigen::VectorXd> nash_profile(const std::vector<Eigen::VectorXd>& d, double theta,
                                          const Eigen::VectorXd& p);

/// r_i = -p_i 1^T var[u] + theta d_i^T A[u].
double step_reward(const std::vector<Eigen::VectorXd>& u, const Eigen::VectorXd& t, double p, double theta,
                   const Eigen::VectorXd& d);

/// Negated reward: p_i 1^T var[u] - theta d_i^T A[u].
double stage_cost(const std::vector<Eigen::VectorXd>& u, const Eigen::VectorXd& t, double p, double theta,
                  const Eigen::VectorXd& d);

/// Analytic gradient of stage_cost with respect to u_player.
Eigen::VectorXd stage_cost_gradient(const std::vector<Eigen::VectorXd>& u, const Eigen::VectorXd& t, int player,
                                    double p, double theta, const Eigen::VectorXd& d);

/// Influence-weighted mean deviation of everyone except `player`:
/// sum_{j != i} t_j u_j / (1 - t_i).
Eigen::VectorXd opponent_environment(const std::vector<Eigen::VectorXd>& u, const Eigen::VectorXd& t, int player);

/// Affine estimate f(s) = B^T [1; s] of the opponents' mean deviation,
/// fitted by recursive least squares.
class EnvironmentModel {
 public:
  EnvironmentModel() = default;
  EnvironmentModel(int state_dim, int output_dim, double prior_variance = 1.0, double forgetting = 1.0);

  Eigen::VectorXd predict(const Eigen::VectorXd& state) const;
  /// Prediction with no state available: the intercept alone.
  Eigen::VectorXd intercept() const { return coef_.row(0).transpose(); }
  void observe(const Eigen::VectorXd& state, const Eigen::VectorXd& target);

  const Eigen::MatrixXd& coefficients() const { return coef_; }  // row 0 intercept, row 1+k slope on s_k
  std::size_t observations() const { return count_; }
  /// Running mean of the squared prediction error (summed over outputs).
  double residual_variance() const { return residual_variance_; }

  /// CSV "param,output,value" with params intercept, s0, s1, ... and a final residual_variance row.
  void write_csv(std::ostream& os) const;

 private:
  Eigen::MatrixXd coef_;
  Eigen::MatrixXd cov_;
  double forgetting_ = 1.0;
  double residual_variance_ = 0.0;
  std::size_t count_ = 0;
};

/// What an agent knows about the game it plays in.
struct AgentContext {
  int player = 0;
  double theta = 0.1;
  Eigen::VectorXd t;  // influence weights of all players
  Eigen::VectorXd d;  // own Shapley linear-form row
};

/// Everything broadcast after a step: the public state, the realized deviations and rewards.
struct StepFeedback {
  std::optional<Eigen::VectorXd> state;  // A[x[k-1]]; absent at k = 0
  Eigen::VectorXd own_deviation;
  Eigen::VectorXd environment;  // opponent_environment for this agent
  double reward = 0.0;
};

class Agent {
 public:
  virtual ~Agent() = default;
  virtual Eigen::VectorXd act(const std::optional<Eigen::VectorXd>& state, std::mt19937_64& rng) = 0;
  virtual void observe(const StepFeedback& feedback) = 0;
  virtual AgentKind kind() const = 0;
};

class TruthfulAgent : public Agent {
 public:
  explicit TruthfulAgent(int m) : m_(m) {}
  Eigen::VectorXd act(const std::optional<Eigen::VectorXd>&, std::mt19937_64&) override {
    return Eigen::VectorXd::Zero(m_);
  }
  void observe(const StepFeedback&) override {}
  AgentKind kind() const override { return AgentKind::kTruthful; }

 private:
  int m_;
};

class NashAgent : public Agent {
 public:
  NashAgent(const AgentContext& ctx, double p) : u_(nash_deviation(ctx.d, ctx.theta, p)) {}
  Eigen::VectorXd act(const std::optional<Eigen::VectorXd>&, std::mt19937_64&) override { return u_; }
  void observe(const StepFeedback&) override {}
  AgentKind kind() const override { return AgentKind::kNash; }

 private:
  Eigen::VectorXd u_;
};

/// Plays the best response to its learned opponent model with probability gamma and
/// a Gaussian perturbation of it otherwise; keeps average-reward values over the two modes.
class RLearningAgent : public Agent {
 public:
  enum Mode { kExploit = 0, kExplore = 1 };

  RLearningAgent(const AgentContext& ctx, double p, const RLearningConfig& config);

  Eigen::VectorXd act(const std::optional<Eigen::VectorXd>& state, std::mt19937_64& rng) override;
  void observe(const StepFeedback& feedback) override;
  AgentKind kind() const override { return AgentKind::kRLearning; }

  /// Deterministic best response to the current model at `state`.
  Eigen::VectorXd best_response(const std::optional<Eigen::VectorXd>& state) const;

  const EnvironmentModel& model() const { return model_; }
  double average_reward() const { return rho_; }
  double value(Mode mode) const { return q_[mode]; }
  Mode last_mode() const { return mode_; }
  double exploration_std() const { return std_; }

 private:
  AgentContext ctx_;
  double p_;
  RLearningConfig config_;
  EnvironmentModel model_;
  double std_;
  double rho_ = 0.0;
  double q_[2] = {0.0, 0.0};
  Mode mode_ = kExploit;
};

std::unique_ptr<Agent> make_agent(const PlayerParams& params, const AgentContext& ctx);

}  // namespace opinex

#endif  // OPINEX_AGENTS_HPP
