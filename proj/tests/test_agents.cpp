#include "opinex/agents.hpp"
#include "opinex/consensus.hpp"
#include "opinex/generators.hpp"
#include "opinex/shapley.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <sstream>

using namespace opinex;

namespace {

const Eigen::Vector2d kT(4.0 / 11, 7.0 / 11);
const Eigen::Vector2d kD1(0.5, -0.5);

}  // namespace

TEST_CASE("closed-form equilibrium deviation") {
  const Eigen::VectorXd u1 = nash_deviation(kD1, 0.1, kT[0]);
  CHECK(u1[0] == doctest::Approx(0.06875).epsilon(1e-14));
  CHECK(u1[1] == doctest::Approx(-0.06875).epsilon(1e-14));
  CHECK(nash_deviation(kD1, 0.0, kT[0]).isZero());
  CHECK_THROWS(nash_deviation(kD1, 0.1, 0.0));
}

TEST_CASE("equilibrium profile with p proportional to t has zero weighted mean") {
  std::mt19937_64 rng(1);
  for (int n = 2; n <= 6; ++n) {
    const auto form = shapley_linear_form(n);
    const Eigen::VectorXd t = oracle::random_weights(n, rng);
    const auto u = nash_profile(form.rows, 0.1, 3.0 * t);
    CHECK(weighted_deviation(u, t).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("best response") {
  const Eigen::VectorXd alone = nash_best_response(kD1, 0.1, kT[0], kT[0], Eigen::Vector2d::Zero());
  CHECK(alone.isApprox(kD1 * 0.1 / (2 * kT[0] * (1 - kT[0])), 1e-14));

  // Against the others' equilibrium deviations the best response is the equilibrium deviation.
  std::mt19937_64 rng(2);
  for (int n = 2; n <= 5; ++n) {
    const auto form = shapley_linear_form(n);
    const Eigen::VectorXd t = oracle::random_weights(n, rng);
    const auto u = nash_profile(form.rows, 0.2, 0.7 * t);
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd others = weighted_deviation(u, t) - t[i] * u[static_cast<std::size_t>(i)];
      const Eigen::VectorXd br = nash_best_response(form.rows[static_cast<std::size_t>(i)], 0.2, 0.7 * t[i], t[i], others);
      CHECK((br - u[static_cast<std::size_t>(i)]).cwiseAbs().maxCoeff() < 1e-14);
    }
  }
  CHECK(nash_best_response(Eigen::Vector2d::Zero(), 0.1, 1.0, 0.4, Eigen::Vector2d::Zero()).isZero());
  CHECK_THROWS(nash_best_response(kD1, 0.1, 1.0, 1.0, Eigen::Vector2d::Zero()));
}

TEST_CASE("step reward") {
  const std::vector<Eigen::VectorXd> zero{Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero()};
  CHECK(step_reward(zero, kT, 1.0, 0.1, kD1) == 0.0);

  const Eigen::Vector2d c(0.2, 0.05);
  CHECK(step_reward({c, c}, kT, 1.0, 0.1, kD1) == doctest::Approx(0.1 * kD1.dot(c)).epsilon(1e-14));

  const auto u = nash_profile({kD1, -kD1}, 0.1, kT);
  const double r = step_reward(u, kT, kT[0], 0.1, kD1);
  CHECK(r < 0.0);
  CHECK(r == doctest::Approx(-kT[0] * deviation_disutility(u, kT)).epsilon(1e-14));
}

TEST_CASE("analytic stage-cost gradient matches central differences") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0.0, 0.1);
  const int n = 3;
  const auto form = shapley_linear_form(n);
  const Eigen::VectorXd t = oracle::random_weights(n, rng);
  std::vector<Eigen::VectorXd> u;
  for (int i = 0; i < n; ++i) u.push_back(Eigen::VectorXd::NullaryExpr(6, [&] { return noise(rng); }));
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd g = stage_cost_gradient(u, t, i, 0.8, 0.1, form.rows[static_cast<std::size_t>(i)]);
    for (int c = 0; c < 6; ++c) {
      auto up = u, down = u;
      up[static_cast<std::size_t>(i)][c] += 1e-5;
      down[static_cast<std::size_t>(i)][c] -= 1e-5;
      const double fd = (stage_cost(up, t, 0.8, 0.1, form.rows[static_cast<std::size_t>(i)]) -
                         stage_cost(down, t, 0.8, 0.1, form.rows[static_cast<std::size_t>(i)])) / 2e-5;
      CHECK(g[c] == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("trajectory objective decomposes into stage costs") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> noise(0.0, 0.05);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 4;
    const auto m = static_cast<Eigen::Index>(restricted_size(n));
    const auto form = shapley_linear_form(n);
    const auto w = InfluenceMatrix::from_rows(random_primitive_stochastic(n, rng));
    const Eigen::VectorXd& t = w.weights();
    std::vector<SetFunction> v0;
    for (int i = 0; i < n; ++i) v0.push_back(random_supermodular(n, rng));
    auto profile = OpinionProfile::initial(v0);
    const double theta = 0.15, p = 0.6;
    const int player = trial % n;
    const auto& d = form.rows[static_cast<std::size_t>(player)];
    double disutility = 0.0, stages = 0.0;
    for (int k = 0; k < 15; ++k) {
      std::vector<Eigen::VectorXd> u;
      for (int i = 0; i < n; ++i) u.push_back(Eigen::VectorXd::NullaryExpr(m, [&] { return noise(rng); }));
      profile.reveal(u);
      disutility += deviation_disutility(u, t);
      stages += stage_cost(u, t, p, theta, d);
      profile = step_strategic(profile, w, theta);
    }
    const double objective = p * disutility - d.dot(average_opinion(profile, t).restricted());
    const double constant = d.dot(weighted_average(v0, t).restricted());
    CHECK(objective == doctest::Approx(stages - constant).epsilon(1e-10));
  }
}

TEST_CASE("environment model recovers an affine map from noiseless data") {
  EnvironmentModel model(2, 2, 1e6);
  CHECK(model.predict(Eigen::Vector2d(0.3, 0.4)).isZero());
  Eigen::Matrix2d a;
  a << 0.5, -0.2, 0.1, 0.3;
  const Eigen::Vector2d b(0.05, -0.01);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const Eigen::Vector2d s(u(rng), u(rng));
    model.observe(s, a * s + b);
  }
  CHECK((model.coefficients().row(0).transpose() - b).cwiseAbs().maxCoeff() < 1e-6);
  CHECK((model.coefficients().bottomRows(2).transpose() - a).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(model.observations() == 50);

  std::ostringstream os;
  model.write_csv(os);
  CHECK(os.str().rfind("param,output,value\nintercept,0,", 0) == 0);
}

TEST_CASE("environment model on repeated data converges to the observed value") {
  EnvironmentModel model(2, 2);
  const Eigen::Vector2d s(0.4, 0.2), e(0.03, -0.07);
  double early = 0.0;
  for (int k = 1; k <= 5000; ++k) {
    model.observe(s, e);
    if (k == 100) early = (model.predict(s) - e).cwiseAbs().maxCoeff();
  }
  const double late = (model.predict(s) - e).cwiseAbs().maxCoeff();
  CHECK(late < early / 40);
  CHECK(late < 2e-5);
}

TEST_CASE("R-learning agent with full exploitation plays the best response") {
  AgentContext ctx{0, 0.1, kT, kD1};
  RLearningConfig cfg;
  cfg.gamma = 1.0;
  RLearningAgent agent(ctx, kT[0], cfg);
  std::mt19937_64 rng(6);
  const Eigen::VectorXd expected = nash_best_response(kD1, 0.1, kT[0], kT[0], Eigen::Vector2d::Zero());
  CHECK(agent.act(std::nullopt, rng) == expected);
  CHECK(agent.act(Eigen::VectorXd(Eigen::Vector2d(0.4, 0.3)), rng) == expected);
  CHECK(agent.last_mode() == RLearningAgent::kExploit);
}

TEST_CASE("R-learning agent with no exploitation perturbs its action") {
  AgentContext ctx{1, 0.1, kT, -kD1};
  RLearningConfig cfg;
  cfg.gamma = 0.0;
  cfg.explore_decay = 0.5;
  RLearningAgent agent(ctx, kT[1], cfg);
  std::mt19937_64 rng(7);
  const auto u = agent.act(std::nullopt, rng);
  CHECK((u - agent.best_response(std::nullopt)).cwiseAbs().minCoeff() > 0.0);
  CHECK(agent.last_mode() == RLearningAgent::kExplore);
  CHECK(agent.exploration_std() == doctest::Approx(0.025));
}

TEST_CASE("R-learning agent learns the opponent and tracks its average reward") {
  AgentContext ctx{0, 0.1, kT, kD1};
  RLearningConfig cfg;
  cfg.gamma = 1.0;
  RLearningAgent agent(ctx, kT[0], cfg);
  CHECK(agent.model().coefficients().isZero());
  std::mt19937_64 rng(8);
  const Eigen::Vector2d opponent(-0.04, 0.04);
  for (int k = 0; k < 2000; ++k) {
    const Eigen::Vector2d s(0.45, 0.35);
    const auto u = agent.act(Eigen::VectorXd(s), rng);
    const std::vector<Eigen::VectorXd> profile{u, opponent};
    agent.observe(StepFeedback{Eigen::VectorXd(s), u, opponent, step_reward(profile, kT, kT[0], 0.1, kD1)});
  }
  CHECK((agent.model().predict(Eigen::Vector2d(0.45, 0.35)) - opponent).cwiseAbs().maxCoeff() < 1e-3);
  const auto settled = agent.act(Eigen::VectorXd(Eigen::Vector2d(0.45, 0.35)), rng);
  const std::vector<Eigen::VectorXd> profile{settled, opponent};
  CHECK(agent.average_reward() == doctest::Approx(step_reward(profile, kT, kT[0], 0.1, kD1)).epsilon(1e-2));
}

TEST_CASE("agent configuration is validated") {
  PlayerParams p;
  p.p = -1;
  CHECK_THROWS(p.validate());
  RLearningConfig cfg;
  cfg.gamma = 1.5;
  CHECK_THROWS(cfg.validate());
  CHECK(parse_agent_kind("nash") == AgentKind::kNash);
  CHECK_THROWS(parse_agent_kind("liar"));
}
