#include "opinex/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace opinex {

namespace {

constexpr double kPivotEps = 1e-11;

}  // namespace

void LinearFeasibilityProblem::add_row(const Eigen::VectorXd& coefficients, Sense sense, double rhs) {
  if (a.rows() == 0 && a.cols() == 0) a.resize(0, coefficients.size());
  if (coefficients.size() != a.cols()) throw std::invalid_argument("add_row: coefficient count mismatch");
  a.conservativeResize(a.rows() + 1, Eigen::NoChange);
  a.row(a.rows() - 1) = coefficients.transpose();
  senses.push_back(sense);
  b.conservativeResize(b.size() + 1);
  b[b.size() - 1] = rhs;
}

void LinearFeasibilityProblem::validate() const {
  if (a.rows() == 0) throw std::invalid_argument("linear feasibility problem has no constraints");
  if (a.cols() == 0) throw std::invalid_argument("linear feasibility problem has no variables");
  if (static_cast<Eigen::Index>(senses.size()) != a.rows() || b.size() != a.rows()) {
    throw std::invalid_argument("linear feasibility problem: row count mismatch between A, senses and b");
  }
  if (!a.allFinite() || !b.allFinite()) throw std::invalid_argument("linear feasibility problem has non-finite entries");
}

double max_violation(const LinearFeasibilityProblem& p, const Eigen::VectorXd& x) {
  const Eigen::VectorXd lhs = p.a * x;
  double worst = 0.0;
  for (Eigen::Index r = 0; r < lhs.size(); ++r) {
    const double gap = lhs[r] - p.b[r];
    switch (p.senses[static_cast<std::size_t>(r)]) {
      case Sense::kGreaterEqual: worst = std::max(worst, -gap); break;
      case Sense::kLessEqual: worst = std::max(worst, gap); break;
      case Sense::kEqual: worst = std::max(worst, std::abs(gap)); break;
    }
  }
  return worst;
}

FeasibilityResult lp_feasible(const LinearFeasibilityProblem& p, const LpOptions& options) {
  p.validate();
  const int rows = p.rows();
  const int nvars = p.variables();

  // Normalize every row to b >= 0 and decide which rows get a slack and which an artificial.
  std::vector<double> sign(static_cast<std::size_t>(rows), 1.0);
  std::vector<Sense> sense(p.senses);
  int slacks = 0;
  int artificials = 0;
  for (int r = 0; r < rows; ++r) {
    if (p.b[r] < 0.0 || (p.b[r] == 0.0 && sense[r] == Sense::kGreaterEqual)) {
      sign[r] = -1.0;
      if (sense[r] == Sense::kGreaterEqual) sense[r] = Sense::kLessEqual;
      else if (sense[r] == Sense::kLessEqual) sense[r] = Sense::kGreaterEqual;
    }
    if (sense[r] != Sense::kEqual) ++slacks;
    if (sense[r] != Sense::kLessEqual) ++artificials;
  }

  const int structural = 2 * nvars;
  const int cols = structural + slacks + artificials;
  const int rhs = cols;
  // Row `rows` holds the phase-1 reduced costs (minimize the sum of artificials).
  using Tableau = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Tableau t = Tableau::Zero(rows + 1, cols + 1);
  std::vector<int> basis(static_cast<std::size_t>(rows));
  int next_slack = structural;
  int next_art = structural + slacks;
  for (int r = 0; r < rows; ++r) {
    const Eigen::RowVectorXd coef = sign[r] * p.a.row(r);
    t.block(r, 0, 1, nvars) = coef;
    t.block(r, nvars, 1, nvars) = -coef;
    t(r, rhs) = sign[r] * p.b[r];
    switch (sense[r]) {
      case Sense::kLessEqual:
        t(r, next_slack) = 1.0;
        basis[r] = next_slack++;
        break;
      case Sense::kGreaterEqual:
        t(r, next_slack++) = -1.0;
        t(r, next_art) = 1.0;
        basis[r] = next_art++;
        break;
      case Sense::kEqual:
        t(r, next_art) = 1.0;
        basis[r] = next_art++;
        break;
    }
    if (basis[r] >= structural + slacks) t.row(rows) -= t.row(r);
  }
  for (int c = structural + slacks; c < cols; ++c) t(rows, c) = 0.0;

  const std::size_t cap = options.max_pivots != 0
                              ? options.max_pivots
                              : 10 * static_cast<std::size_t>(rows + cols) * static_cast<std::size_t>(rows + cols);
  FeasibilityResult result;
  while (true) {
    int enter = -1;
    for (int c = 0; c < cols; ++c) {
      if (t(rows, c) < -kPivotEps) {
        enter = c;
        break;
      }
    }
    if (enter < 0) break;

    int leave = -1;
    double best_ratio = 0.0;
    for (int r = 0; r < rows; ++r) {
      const double pivot = t(r, enter);
      if (pivot <= kPivotEps) continue;
      const double ratio = t(r, rhs) / pivot;
      if (leave < 0 || ratio < best_ratio - 1e-15 ||
          (ratio <= best_ratio + 1e-15 && basis[r] < basis[leave])) {
        leave = r;
        best_ratio = ratio;
      }
    }
    // Phase-1 objective is bounded below by zero, so an entering column always has a pivot row.
    if (leave < 0) break;

    if (++result.pivots > cap) {
      throw LpIterationLimit("simplex exceeded " + std::to_string(cap) + " pivots on a " + std::to_string(rows) +
                             "x" + std::to_string(nvars) + " problem");
    }
    t.row(leave) /= t(leave, enter);
    for (int r = 0; r <= rows; ++r) {
      if (r == leave) continue;
      const double factor = t(r, enter);
      if (factor != 0.0) t.row(r) -= factor * t.row(leave);
    }
    basis[leave] = enter;
  }

  const double infeasibility = -t(rows, rhs);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(nvars);
  for (int r = 0; r < rows; ++r) {
    const int c = basis[r];
    if (c < nvars) x[c] += t(r, rhs);
    else if (c < structural) x[c - nvars] -= t(r, rhs);
  }
  if (infeasibility <= options.tol && max_violation(p, x) <= options.tol) {
    result.feasible = true;
    result.witness = std::move(x);
  }
  return result;
}

}  // namespace opinex
