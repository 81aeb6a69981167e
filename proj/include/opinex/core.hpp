#ifndef OPINEX_CORE_HPP
#define OPINEX_CORE_HPP

#include "opinex/setfn.hpp"
#include "opinex/shapley.hpp"
#include "opinex/simplex.hpp"

#include <span>

namespace opinex {

inline constexpr double kCoreTolerance = 1e-9;

/// sum_{i in C} g_i >= f(C) - tol for every C, and |sum_i g_i - f(N)| <= tol.
bool core_contains(const SetFunction& f, const Allocation& g, double tol = kCoreTolerance);

/// One >= row per proper nonempty coalition plus the equality on N.
LinearFeasibilityProblem core_constraints(const SetFunction& f);

struct CoreVerdict {
  bool empty = true;
  Allocation witness;  // a member of the core when nonempty
  std::size_t pivots = 0;
};

CoreVerdict check_core(const SetFunction& f, const LpOptions& options = {});
bool core_is_empty(const SetFunction& f, double tol = kCoreTolerance);

/// Allocations every player accepts: sum_{j in C} g_j >= v_i(C) for all i and all
/// proper C, and sum_j g_j <= v_i(N) for all i.
bool bayesian_core_contains(std::span<const SetFunction> opinions, const Allocation& g,
                            double tol = kCoreTolerance);

/// Per coalition only the largest v_i(C) binds, so each C contributes one row.
LinearFeasibilityProblem bayesian_core_constraints(std::span<const SetFunction> opinions);

CoreVerdict check_bayesian_core(std::span<const SetFunction> opinions, const LpOptions& options = {});
bool bayesian_core_is_empty(std::span<const SetFunction> opinions, double tol = kCoreTolerance);

}  // namespace opinex

#endif  // OPINEX_CORE_HPP
