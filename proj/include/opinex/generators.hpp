#ifndef OPINEX_GENERATORS_HPP
#define OPINEX_GENERATORS_HPP

#include "opinex/setfn.hpp"

#include <Eigen/Core>

#include <random>

namespace opinex {

/// Row-stochastic matrix with every entry positive (hence primitive):
/// entries drawn uniformly from [min_weight, 1] and rows normalized.
Eigen::MatrixXd random_primitive_stochastic(int n, std::mt19937_64& rng, double min_weight = 0.05);

/// Random normalized, strictly supermodular set function: a nonnegative modular part,
/// positive pairwise synergies and a cubic cardinality term, scaled so v(N) = 1.
SetFunction random_supermodular(int n, std::mt19937_64& rng);

}  // namespace opinex

#endif  // OPINEX_GENERATORS_HPP
