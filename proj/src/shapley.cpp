#include "opinex/shapley.hpp"

#include <stdexcept>
#include <string>

namespace opinex {

std::vector<double> shapley_weights(int n) {
  check_player_count(n);
  // w[s] = s!(n-s-1)!/n!, built by the ratio w[s+1]/w[s] = (s+1)/(n-s-1).
  std::vector<double> w(static_cast<std::size_t>(n));
  w[0] = 1.0 / n;
  for (int s = 0; s + 1 < n; ++s) w[s + 1] = w[s] * (s + 1) / (n - s - 1);
  return w;
}

Allocation shapley_value(const SetFunction& f) {
  const int n = f.players();
  const auto w = shapley_weights(n);
  const Coalition full = grand_coalition(n);
  Allocation g{Eigen::VectorXd::Zero(n)};
  for (int i = 0; i < n; ++i) {
    const Coalition bit = Coalition{1} << i;
    double acc = 0.0;
    for (Coalition c = 0; c <= full; ++c) {
      if (c & bit) continue;
      acc += w[cardinality(c)] * (f[c | bit] - f[c]);
    }
    g.payoffs[i] = acc;
  }
  return g;
}

double ShapleyLinearForm::payoff(int player, const Eigen::VectorXd& restricted) const {
  if (player < 0 || player >= n) throw std::out_of_range("ShapleyLinearForm: no player " + std::to_string(player));
  return offsets[player] + rows[static_cast<std::size_t>(player)].dot(restricted);
}

Eigen::VectorXd ShapleyLinearForm::payoffs(const Eigen::VectorXd& restricted, double grand) const {
  Eigen::VectorXd g(n);
  for (int i = 0; i < n; ++i) g[i] = offsets[i] * grand + rows[static_cast<std::size_t>(i)].dot(restricted);
  return g;
}

ShapleyLinearForm shapley_linear_form(int n) {
  if (n < 2 || n > 12) throw std::invalid_argument("shapley_linear_form: n must lie in [2, 12]");
  const auto m = static_cast<Eigen::Index>(restricted_size(n));
  ShapleyLinearForm form;
  form.n = n;
  form.rows.assign(static_cast<std::size_t>(n), Eigen::VectorXd::Zero(m));

  SetFunction indicator(n);
  for (Eigen::Index k = 0; k < m; ++k) {
    const Coalition c = subset_at(static_cast<std::size_t>(k), n);
    indicator.set(c, 1.0);
    const auto g = shapley_value(indicator);
    for (int i = 0; i < n; ++i) form.rows[static_cast<std::size_t>(i)][k] = g.payoffs[i];
    indicator.set(c, 0.0);
  }
  indicator.set(grand_coalition(n), 1.0);
  form.offsets = shapley_value(indicator).payoffs;
  return form;
}

}  // namespace opinex
