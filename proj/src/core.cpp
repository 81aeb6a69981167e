#include "opinex/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace opinex {

namespace {

double coalition_sum(const Eigen::VectorXd& g, Coalition c) {
  double s = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    if (contains(c, i)) s += g[i];
  }
  return s;
}

Eigen::VectorXd membership_row(int n, Coalition c) {
  Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    if (contains(c, i)) row[i] = 1.0;
  }
  return row;
}

void check_allocation(int n, const Allocation& g) {
  if (g.players() != n) {
    throw std::invalid_argument("allocation has " + std::to_string(g.players()) + " payoffs for " +
                                std::to_string(n) + " players");
  }
}

int common_players(std::span<const SetFunction> opinions) {
  if (opinions.empty()) throw std::invalid_argument("Bayesian core needs at least one opinion");
  const int n = opinions.front().players();
  for (const auto& v : opinions) {
    if (v.players() != n) throw std::invalid_argument("opinions disagree on the player count");
  }
  if (static_cast<int>(opinions.size()) != n) {
    throw std::invalid_argument("Bayesian core needs one opinion per player: got " +
                                std::to_string(opinions.size()) + " for " + std::to_string(n) + " players");
  }
  return n;
}

CoreVerdict solve(const LinearFeasibilityProblem& p, const LpOptions& options) {
  const auto r = lp_feasible(p, options);
  CoreVerdict verdict;
  verdict.empty = !r.feasible;
  verdict.pivots = r.pivots;
  if (r.feasible) verdict.witness.payoffs = r.witness;
  return verdict;
}

}  // namespace

bool core_contains(const SetFunction& f, const Allocation& g, double tol) {
  const int n = f.players();
  check_allocation(n, g);
  const Coalition full = grand_coalition(n);
  for (Coalition c = 1; c < full; ++c) {
    if (coalition_sum(g.payoffs, c) < f[c] - tol) return false;
  }
  return std::abs(g.total() - f.grand()) <= tol;
}

LinearFeasibilityProblem core_constraints(const SetFunction& f) {
  const int n = f.players();
  LinearFeasibilityProblem p;
  p.a.resize(0, n);
  for (Coalition c = 1; c < grand_coalition(n); ++c) p.add_row(membership_row(n, c), Sense::kGreaterEqual, f[c]);
  p.add_row(Eigen::VectorXd::Ones(n), Sense::kEqual, f.grand());
  return p;
}

CoreVerdict check_core(const SetFunction& f, const LpOptions& options) {
  return solve(core_constraints(f), options);
}

bool core_is_empty(const SetFunction& f, double tol) { return check_core(f, LpOptions{tol, 0}).empty; }

bool bayesian_core_contains(std::span<const SetFunction> opinions, const Allocation& g, double tol) {
  const int n = common_players(opinions);
  check_allocation(n, g);
  for (Coalition c = 1; c < grand_coalition(n); ++c) {
    const double s = coalition_sum(g.payoffs, c);
    for (const auto& v : opinions) {
      if (s < v[c] - tol) return false;
    }
  }
  for (const auto& v : opinions) {
    if (g.total() > v.grand() + tol) return false;
  }
  return true;
}

LinearFeasibilityProblem bayesian_core_constraints(std::span<const SetFunction> opinions) {
  const int n = common_players(opinions);
  LinearFeasibilityProblem p;
  p.a.resize(0, n);
  for (Coalition c = 1; c < grand_coalition(n); ++c) {
    double demand = -std::numeric_limits<double>::infinity();
    for (const auto& v : opinions) demand = std::max(demand, v[c]);
    p.add_row(membership_row(n, c), Sense::kGreaterEqual, demand);
  }
  double budget = std::numeric_limits<double>::infinity();
  for (const auto& v : opinions) budget = std::min(budget, v.grand());
  p.add_row(Eigen::VectorXd::Ones(n), Sense::kLessEqual, budget);
  return p;
}

CoreVerdict check_bayesian_core(std::span<const SetFunction> opinions, const LpOptions& options) {
  return solve(bayesian_core_constraints(opinions), options);
}

bool bayesian_core_is_empty(std::span<const SetFunction> opinions, double tol) {
  return check_bayesian_core(opinions, LpOptions{tol, 0}).empty;
}

}  // namespace opinex
