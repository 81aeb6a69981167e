#ifndef OPINEX_SIMPLEX_HPP
#define OPINEX_SIMPLEX_HPP

#include <Eigen/Core>

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace opinex {

enum class Sense { kGreaterEqual, kLessEqual, kEqual };

/// Rows of `a . x (sense) b` over free (unbounded) variables x.
struct LinearFeasibilityProblem {
  Eigen::MatrixXd a;
  std::vector<Sense> senses;
  Eigen::VectorXd b;

  int variables() const { return static_cast<int>(a.cols()); }
  int rows() const { return static_cast<int>(a.rows()); }
  void add_row(const Eigen::VectorXd& coefficients, Sense sense, double rhs);
  void validate() const;
};

struct LpOptions {
  double tol = 1e-9;
  std::size_t max_pivots = 0;  // 0 selects 10*(rows+cols)^2
};

struct FeasibilityResult {
  bool feasible = false;
  Eigen::VectorXd witness;  // set only when feasible
  std::size_t pivots = 0;
};

class LpIterationLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Largest amount by which x violates any row (0 when all rows hold).
double max_violation(const LinearFeasibilityProblem& p, const Eigen::VectorXd& x);

/// Phase-1 dense simplex with Bland's rule. Free variables are split into
/// positive and negative parts; deterministic for a given problem.
FeasibilityResult lp_feasible(const LinearFeasibilityProblem& p, const LpOptions& options = {});

}  // namespace opinex

#endif  // OPINEX_SIMPLEX_HPP
