#include "opinex/generators.hpp"

#include <cmath>
#include <stdexcept>

namespace opinex {

Eigen::MatrixXd random_primitive_stochastic(int n, std::mt19937_64& rng, double min_weight) {
  if (n < 1) throw std::invalid_argument("random_primitive_stochastic: n must be positive");
  if (!(min_weight > 0.0 && min_weight <= 1.0)) throw std::invalid_argument("min_weight must lie in (0, 1]");
  std::uniform_real_distribution<double> entry(min_weight, 1.0);
  Eigen::MatrixXd w(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) w(i, j) = entry(rng);
    w.row(i) /= w.row(i).sum();
  }
  return w;
}

SetFunction random_supermodular(int n, std::mt19937_64& rng) {
  check_player_count(n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> synergy(0.2, 1.0);
  Eigen::VectorXd a(n);
  for (int i = 0; i < n; ++i) a[i] = unit(rng);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) w(i, j) = synergy(rng);
  }
  const double cubic = unit(rng);

  SetFunction f(n);
  for (Coalition c = 1; c <= grand_coalition(n); ++c) {
    double value = cubic * std::pow(static_cast<double>(cardinality(c)) / n, 3);
    for (int i = 0; i < n; ++i) {
      if (!contains(c, i)) continue;
      value += a[i];
      for (int j = i + 1; j < n; ++j) {
        if (contains(c, j)) value += w(i, j);
      }
    }
    f.set(c, value);
  }
  const double grand = f.grand();
  f *= 1.0 / grand;
  f.set(grand_coalition(n), 1.0);
  return f;
}

}  // namespace opinex
