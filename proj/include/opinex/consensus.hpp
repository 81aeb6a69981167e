#ifndef OPINEX_CONSENSUS_HPP
#define OPINEX_CONSENSUS_HPP

#include "opinex/setfn.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace opinex {

/// W^k does not settle to a rank-one limit (reducible or periodic W).
class ConsensusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws std::invalid_argument unless W is square, entries in [0,1], rows summing to 1 within tol.
void check_stochastic(const Eigen::MatrixXd& w, double tol = 1e-12);

/// Stationary weights t with t^T W = t^T, the common row of lim W^k.
/// The limit is found by repeated squaring; max_iter bounds the power of W reached.
Eigen::VectorXd influence_weights(const Eigen::MatrixXd& w, double tol = 1e-12, std::size_t max_iter = 1000000);

class InfluenceMatrix {
 public:
  InfluenceMatrix() = default;
  static InfluenceMatrix from_rows(const Eigen::MatrixXd& w);

  int players() const { return static_cast<int>(w_.rows()); }
  const Eigen::MatrixXd& matrix() const { return w_; }
  const Eigen::VectorXd& weights() const { return t_; }
  double operator()(int i, int j) const { return w_(i, j); }

 private:
  Eigen::MatrixXd w_;
  Eigen::VectorXd t_;
};

/// True opinions v_i[k] and revealed opinions x_i[k] at one step.
struct OpinionProfile {
  int step = 0;
  std::vector<SetFunction> truth;
  std::vector<SetFunction> revealed;

  /// Step 0 with every player revealing the truth.
  static OpinionProfile initial(std::vector<SetFunction> opinions);

  int players() const { return static_cast<int>(truth.size()); }
  int coalition_players() const { return truth.empty() ? 0 : truth.front().players(); }
  void validate() const;

  /// x_i = v_i + u_i on the restricted entries; v(empty) and v(N) are never altered.
  void reveal(const std::vector<Eigen::VectorXd>& deviations);
  void reveal_truthfully();
  /// u_i = restrict(x_i - v_i).
  std::vector<Eigen::VectorXd> deviations() const;
};

struct ConsensusParams {
  double theta = 0.1;
  int horizon = 100;

  void validate() const;
};

/// v_i[k] = sum_j w_ij v_j[k-1]; the result reveals the truth.
OpinionProfile step_truthful(const OpinionProfile& profile, const InfluenceMatrix& w);

/// v_i[k] = theta sum_j w_ij x_j[k-1] + (1 - theta) v_i[k-1]. The new step starts
/// truthful (x = v) until agents reveal their deviations.
OpinionProfile step_strategic(const OpinionProfile& profile, const InfluenceMatrix& w, double theta);

/// sum_i t_i v_i[k].
SetFunction average_opinion(const OpinionProfile& profile, const Eigen::VectorXd& t);
/// sum_i t_i x_i[k].
SetFunction average_revealed(const OpinionProfile& profile, const Eigen::VectorXd& t);

/// A[u] = sum_i t_i u_i.
Eigen::VectorXd weighted_deviation(const std::vector<Eigen::VectorXd>& deviations, const Eigen::VectorXd& t);

/// 1^T var[u] with var[u] = sum_i t_i u_i^2 - (sum_i t_i u_i)^2, squares elementwise.
double deviation_disutility(const std::vector<Eigen::VectorXd>& deviations, const Eigen::VectorXd& t);

/// max_i ||a_i - b_i||_inf over full set-function values.
double max_opinion_change(const std::vector<SetFunction>& a, const std::vector<SetFunction>& b);

}  // namespace opinex

#endif  // OPINEX_CONSENSUS_HPP
