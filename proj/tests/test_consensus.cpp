#include "opinex/consensus.hpp"
#include "opinex/generators.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace opinex;

namespace {

const Eigen::Matrix2d kTwoPlayerW = (Eigen::Matrix2d() << 0.3, 0.7, 0.4, 0.6).finished();

OpinionProfile two_player_profile() {
  return OpinionProfile::initial({SetFunction::from_restricted(2, Eigen::Vector2d(0.7, 0.1), 1.0),
                                  SetFunction::from_restricted(2, Eigen::Vector2d(0.3, 0.5), 1.0)});
}

}  // namespace

TEST_CASE("influence weights of the two-player matrix") {
  const Eigen::VectorXd t = influence_weights(kTwoPlayerW);
  // t1 = 0.3 t1 + 0.4 t2 and t1 + t2 = 1 give t = (4/11, 7/11).
  CHECK(t[0] == doctest::Approx(4.0 / 11).epsilon(1e-12));
  CHECK(t[1] == doctest::Approx(7.0 / 11).epsilon(1e-12));
}

TEST_CASE("doubly stochastic matrices give uniform weights") {
  Eigen::Matrix3d w;
  w << 0.2, 0.5, 0.3, 0.5, 0.3, 0.2, 0.3, 0.2, 0.5;
  const Eigen::VectorXd t = influence_weights(w);
  for (int i = 0; i < 3; ++i) CHECK(t[i] == doctest::Approx(1.0 / 3).epsilon(1e-12));
}

TEST_CASE("influence weights reject matrices without consensus") {
  CHECK_THROWS_AS(influence_weights(Eigen::Matrix2d::Identity()), ConsensusError);
  CHECK_THROWS_AS(influence_weights((Eigen::Matrix2d() << 0, 1, 1, 0).finished()), ConsensusError);
  CHECK_THROWS_AS(influence_weights((Eigen::Matrix2d() << 0.5, 0.6, 0.5, 0.5).finished()), std::invalid_argument);
  CHECK_THROWS_AS(influence_weights((Eigen::Matrix2d() << 1.5, -0.5, 0.5, 0.5).finished()), std::invalid_argument);
}

TEST_CASE("influence weights are stationary for random primitive matrices") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 7;
    const Eigen::MatrixXd w = random_primitive_stochastic(n, rng);
    const Eigen::VectorXd t = influence_weights(w);
    CHECK((t.transpose() * w - t.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(t.sum() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(t.minCoeff() >= 0.0);
  }
}

TEST_CASE("truthful step mixes opinions through W") {
  const auto w = InfluenceMatrix::from_rows(kTwoPlayerW);
  const auto next = step_truthful(two_player_profile(), w);
  CHECK(next.step == 1);
  CHECK(next.truth[0].restricted().isApprox(Eigen::Vector2d(0.42, 0.38), 1e-14));
  CHECK(next.truth[1].restricted().isApprox(Eigen::Vector2d(0.46, 0.34), 1e-14));
  CHECK(next.revealed[0] == next.truth[0]);

  const auto same = OpinionProfile::initial({power_family(2, 2.0), power_family(2, 2.0)});
  CHECK(step_truthful(same, w).truth[1] == same.truth[1]);
}

TEST_CASE("strategic step blends revealed opinions with the own opinion") {
  const auto w = InfluenceMatrix::from_rows(kTwoPlayerW);
  const auto profile = two_player_profile();
  const auto next = step_strategic(profile, w, 0.1);
  CHECK(next.truth[0].restricted().isApprox(Eigen::Vector2d(0.672, 0.128), 1e-14));
  const auto full_trust = step_strategic(profile, w, 1.0);
  CHECK((full_trust.truth[1].values() - step_truthful(profile, w).truth[1].values()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("deviations with zero weighted mean leave the average opinion unchanged") {
  const auto w = InfluenceMatrix::from_rows(kTwoPlayerW);
  const Eigen::VectorXd& t = w.weights();
  auto profile = two_player_profile();
  const Eigen::Vector2d u1(0.05, -0.02);
  const Eigen::Vector2d u2 = -t[0] / t[1] * u1;
  profile.reveal({u1, u2});
  CHECK(weighted_deviation(profile.deviations(), t).cwiseAbs().maxCoeff() < 1e-16);
  const auto before = average_opinion(profile, t);
  const auto after = average_opinion(step_strategic(profile, w, 0.1), t);
  CHECK((after.values() - before.values()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("average opinion of the two-player profile") {
  const Eigen::Vector2d t(4.0 / 11, 7.0 / 11);
  const auto avg = average_opinion(two_player_profile(), t);
  CHECK(avg.restricted()[0] == doctest::Approx(4.9 / 11).epsilon(1e-14));
  CHECK(avg.restricted()[1] == doctest::Approx(3.9 / 11).epsilon(1e-14));
  const auto same = OpinionProfile::initial({power_family(2, 3.0), power_family(2, 3.0)});
  CHECK(average_opinion(same, t).values().isApprox(power_family(2, 3.0).values(), 1e-15));
}

TEST_CASE("deviation disutility") {
  const Eigen::Vector2d t(4.0 / 11, 7.0 / 11);
  CHECK(deviation_disutility({Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero()}, t) == 0.0);
  CHECK(std::abs(deviation_disutility({Eigen::Vector2d(0.3, -0.1), Eigen::Vector2d(0.3, -0.1)}, t)) < 1e-16);

  const Eigen::Vector2d u1(0.06875, -0.06875);
  const Eigen::Vector2d u2 = -t[0] / t[1] * u1;
  // With a zero weighted mean only sum_i t_i u_i^2 remains.
  const double expected = 2 * (t[0] * 0.06875 * 0.06875 + t[1] * u2[0] * u2[0]);
  CHECK(deviation_disutility({u1, u2}, t) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(expected == doctest::Approx(0.0054018).epsilon(1e-4));
}

TEST_CASE("average opinion moves by theta times the weighted deviation") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> noise(0.0, 0.1);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + trial % 4;
    const auto w = InfluenceMatrix::from_rows(random_primitive_stochastic(n, rng));
    std::vector<SetFunction> v0;
    for (int i = 0; i < n; ++i) v0.push_back(random_supermodular(n, rng));
    auto profile = OpinionProfile::initial(v0);
    const double theta = 0.3;
    const auto m = static_cast<Eigen::Index>(restricted_size(n));
    Eigen::VectorXd accumulated = Eigen::VectorXd::Zero(m);
    for (int k = 0; k < 20; ++k) {
      std::vector<Eigen::VectorXd> u;
      for (int i = 0; i < n; ++i) u.push_back(Eigen::VectorXd::NullaryExpr(m, [&] { return noise(rng); }));
      profile.reveal(u);
      accumulated += theta * weighted_deviation(u, w.weights());
      profile = step_strategic(profile, w, theta);
    }
    const Eigen::VectorXd lhs = average_opinion(profile, w.weights()).restricted() -
                                weighted_average(v0, w.weights()).restricted();
    CHECK((lhs - accumulated).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("truthful dynamics reach consensus at the weighted initial opinion") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 5;
    const auto w = InfluenceMatrix::from_rows(random_primitive_stochastic(n, rng));
    std::vector<SetFunction> v0;
    for (int i = 0; i < n; ++i) v0.push_back(random_supermodular(n, rng));
    const auto limit = weighted_average(v0, w.weights());
    auto profile = OpinionProfile::initial(v0);
    int k = 0;
    for (; k < 1000; ++k) {
      for (const auto& v : profile.truth) REQUIRE(is_supermodular(v, true));
      double gap = 0;
      for (const auto& v : profile.truth) gap = std::max(gap, (v.values() - limit.values()).cwiseAbs().maxCoeff());
      if (gap < 1e-8) break;
      profile = step_truthful(profile, w);
    }
    CHECK(k < 1000);
    CHECK(is_supermodular(limit, true));
  }
}
