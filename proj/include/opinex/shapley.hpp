#ifndef OPINEX_SHAPLEY_HPP
#define OPINEX_SHAPLEY_HPP

#include "opinex/setfn.hpp"

#include <Eigen/Core>

#include <vector>

namespace opinex {

struct Allocation {
  Eigen::VectorXd payoffs;

  int players() const { return static_cast<int>(payoffs.size()); }
  double total() const { return payoffs.sum(); }
};

/// |C|!(n-|C|-1)!/n! for |C| = 0..n-1.
std::vector<double> shapley_weights(int n);

/// Exact Shapley value by the subset-sum formula.
Allocation shapley_value(const SetFunction& f);

/// g_i = offset_i * v(N) + d_i . restrict(v), valid for every set function v.
struct ShapleyLinearForm {
  int n = 0;
  std::vector<Eigen::VectorXd> rows;  // d_i, each of length 2^n - 2
  Eigen::VectorXd offsets;            // all equal to 1/n

  /// Payoff of `player` for a normalized v given by its restricted vector.
  double payoff(int player, const Eigen::VectorXd& restricted) const;
  /// Same for all players and an arbitrary grand-coalition value.
  Eigen::VectorXd payoffs(const Eigen::VectorXd& restricted, double grand = 1.0) const;
};

/// Extracted by evaluating shapley_value on indicator set functions. Requires 2 <= n <= 12.
ShapleyLinearForm shapley_linear_form(int n);

}  // namespace opinex

#endif  // OPINEX_SHAPLEY_HPP
