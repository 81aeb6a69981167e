#include "opinex/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace opinex {

void check_stochastic(const Eigen::MatrixXd& w, double tol) {
  if (w.rows() == 0 || w.rows() != w.cols()) throw std::invalid_argument("influence matrix must be square and nonempty");
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      if (!(w(i, j) >= 0.0 && w(i, j) <= 1.0)) {
        throw std::invalid_argument("influence matrix entry (" + std::to_string(i) + "," + std::to_string(j) +
                                    ") lies outside [0,1]");
      }
    }
    const double sum = w.row(i).sum();
    if (std::abs(sum - 1.0) > tol) {
      throw std::invalid_argument("influence matrix row " + std::to_string(i) + " sums to " +
                                  std::to_string(sum) + ", not 1");
    }
  }
}

Eigen::VectorXd influence_weights(const Eigen::MatrixXd& w, double tol, std::size_t max_iter) {
  check_stochastic(w);
  Eigen::MatrixXd power = w;
  std::size_t exponent = 1;
  while (true) {
    double spread = 0.0;
    for (Eigen::Index r = 1; r < power.rows(); ++r) {
      spread = std::max(spread, (power.row(r) - power.row(0)).cwiseAbs().maxCoeff());
    }
    if (spread <= tol) break;
    if (exponent > max_iter / 2) {
      throw ConsensusError("W^k has not reached a rank-one limit by k=" + std::to_string(exponent) +
                           " (row spread " + std::to_string(spread) + "); W is reducible or periodic");
    }
    power = power * power;
    exponent *= 2;
  }
  Eigen::VectorXd t = power.colwise().mean().transpose();
  t = t.cwiseMax(0.0);
  t /= t.sum();
  return t;
}

InfluenceMatrix InfluenceMatrix::from_rows(const Eigen::MatrixXd& w) {
  InfluenceMatrix m;
  m.t_ = influence_weights(w);
  m.w_ = w;
  return m;
}

OpinionProfile OpinionProfile::initial(std::vector<SetFunction> opinions) {
  OpinionProfile p;
  p.revealed = opinions;
  p.truth = std::move(opinions);
  p.validate();
  return p;
}

void OpinionProfile::validate() const {
  if (truth.empty()) throw std::invalid_argument("opinion profile has no players");
  if (revealed.size() != truth.size()) throw std::invalid_argument("opinion profile: revealed/true size mismatch");
  const int n = truth.front().players();
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i].players() != n || revealed[i].players() != n) {
      throw std::invalid_argument("opinion profile: opinions disagree on the player count");
    }
  }
}

void OpinionProfile::reveal(const std::vector<Eigen::VectorXd>& deviations) {
  if (deviations.size() != truth.size()) throw std::invalid_argument("reveal: one deviation per player required");
  for (std::size_t i = 0; i < truth.size(); ++i) {
    revealed[i] = truth[i];
    revealed[i].assign_restricted(truth[i].restricted() + deviations[i]);
  }
}

void OpinionProfile::reveal_truthfully() { revealed = truth; }

std::vector<Eigen::VectorXd> OpinionProfile::deviations() const {
  std::vector<Eigen::VectorXd> u;
  u.reserve(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) u.push_back(revealed[i].restricted() - truth[i].restricted());
  return u;
}

void ConsensusParams::validate() const {
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("theta must lie strictly between 0 and 1");
  if (horizon < 0) throw std::invalid_argument("horizon must be nonnegative");
}

namespace {

void check_sizes(const OpinionProfile& profile, const InfluenceMatrix& w) {
  profile.validate();
  if (profile.players() != w.players()) {
    throw std::invalid_argument("profile has " + std::to_string(profile.players()) + " players, W has " +
                                std::to_string(w.players()));
  }
}

}  // namespace

OpinionProfile step_truthful(const OpinionProfile& profile, const InfluenceMatrix& w) {
  check_sizes(profile, w);
  const int n = profile.players();
  OpinionProfile next;
  next.step = profile.step + 1;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(profile.truth[0].size()));
    for (int j = 0; j < n; ++j) acc += w(i, j) * profile.truth[static_cast<std::size_t>(j)].values();
    next.truth.emplace_back(profile.coalition_players(), std::move(acc));
  }
  next.revealed = next.truth;
  return next;
}

OpinionProfile step_strategic(const OpinionProfile& profile, const InfluenceMatrix& w, double theta) {
  check_sizes(profile, w);
  const int n = profile.players();
  OpinionProfile next;
  next.step = profile.step + 1;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd mix = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(profile.truth[0].size()));
    for (int j = 0; j < n; ++j) mix += w(i, j) * profile.revealed[static_cast<std::size_t>(j)].values();
    Eigen::VectorXd v = theta * mix + (1.0 - theta) * profile.truth[static_cast<std::size_t>(i)].values();
    next.truth.emplace_back(profile.coalition_players(), std::move(v));
  }
  next.revealed = next.truth;
  return next;
}

SetFunction average_opinion(const OpinionProfile& profile, const Eigen::VectorXd& t) {
  return weighted_average(profile.truth, t);
}

SetFunction average_revealed(const OpinionProfile& profile, const Eigen::VectorXd& t) {
  return weighted_average(profile.revealed, t);
}

Eigen::VectorXd weighted_deviation(const std::vector<Eigen::VectorXd>& deviations, const Eigen::VectorXd& t) {
  if (deviations.empty() || static_cast<Eigen::Index>(deviations.size()) != t.size()) {
    throw std::invalid_argument("weighted_deviation: need one weight per deviation");
  }
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(deviations.front().size());
  for (std::size_t i = 0; i < deviations.size(); ++i) {
    if (deviations[i].size() != acc.size()) throw std::invalid_argument("weighted_deviation: length mismatch");
    acc += t[static_cast<Eigen::Index>(i)] * deviations[i];
  }
  return acc;
}

double deviation_disutility(const std::vector<Eigen::VectorXd>& deviations, const Eigen::VectorXd& t) {
  const Eigen::VectorXd mean = weighted_deviation(deviations, t);
  Eigen::VectorXd second = Eigen::VectorXd::Zero(mean.size());
  for (std::size_t i = 0; i < deviations.size(); ++i) {
    second += t[static_cast<Eigen::Index>(i)] * deviations[i].cwiseAbs2();
  }
  return (second - mean.cwiseAbs2()).sum();
}

double max_opinion_change(const std::vector<SetFunction>& a, const std::vector<SetFunction>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("max_opinion_change: size mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, (a[i].values() - b[i].values()).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace opinex
