// Independent reference implementations used only by the tests.
#pragma once

#include "opinex/setfn.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

using opinex::Coalition;
using opinex::SetFunction;

// Proper nonempty coalitions listed by brute force in ascending bitmask order.
inline std::vector<Coalition> proper_subsets(int n) {
  std::vector<Coalition> out;
  for (Coalition c = 0; c < (Coalition{1} << n); ++c) {
    int members = 0;
    for (int i = 0; i < n; ++i) members += (c >> i) & 1U;
    if (members > 0 && members < n) out.push_back(c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline long double factorial(int k) {
  long double r = 1;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

// Average marginal contribution over all n! join orders.
inline Eigen::VectorXd permutation_shapley(const SetFunction& f) {
  const int n = f.players();
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::vector<long double> acc(static_cast<std::size_t>(n), 0.0L);
  long double count = 0;
  do {
    Coalition c = 0;
    for (int i : order) {
      const Coalition next = c | (Coalition{1} << i);
      acc[static_cast<std::size_t>(i)] += static_cast<long double>(f[next]) - f[c];
      c = next;
    }
    count += 1;
  } while (std::next_permutation(order.begin(), order.end()));
  Eigen::VectorXd g(n);
  for (int i = 0; i < n; ++i) g[i] = static_cast<double>(acc[static_cast<std::size_t>(i)] / count);
  return g;
}

// Coefficient of v(C) in player i's Shapley value:
// |C|-1 others precede i when i is in C, |C| others precede otherwise.
inline Eigen::VectorXd closed_form_d(int n, int player) {
  const auto subsets = proper_subsets(n);
  Eigen::VectorXd d(static_cast<Eigen::Index>(subsets.size()));
  for (std::size_t k = 0; k < subsets.size(); ++k) {
    const Coalition c = subsets[k];
    int s = 0;
    for (int i = 0; i < n; ++i) s += (c >> i) & 1U;
    if ((c >> player) & 1U) {
      d[static_cast<Eigen::Index>(k)] = static_cast<double>(factorial(s - 1) * factorial(n - s) / factorial(n));
    } else {
      d[static_cast<Eigen::Index>(k)] = -static_cast<double>(factorial(s) * factorial(n - s - 1) / factorial(n));
    }
  }
  return d;
}

// Increasing marginal returns: f(X+x) - f(X) <= f(Y+x) - f(Y) for all X subset of Y, x outside Y.
inline bool marginal_supermodular(const SetFunction& f, double tol = 0.0) {
  const int n = f.players();
  const Coalition full = (Coalition{1} << n) - 1;
  for (Coalition y = 0; y <= full; ++y) {
    for (Coalition x = y;; x = (x - 1) & y) {
      for (int e = 0; e < n; ++e) {
        const Coalition bit = Coalition{1} << e;
        if (y & bit) continue;
        if (f[x | bit] - f[x] > f[y | bit] - f[y] + tol) return false;
      }
      if (x == 0) break;
    }
  }
  return true;
}

// Best worst-slack of the three-player core constraints over a grid of step h
// on the efficient plane. >= 0 proves the core nonempty; if the core is nonempty
// the result is at least -2h.
inline double core_grid_margin(const SetFunction& f, double h) {
  const double total = f[7];
  double best = -1e300;
  const double lo1 = f[1], hi1 = total - f[6];
  const double lo2 = f[2], hi2 = total - f[5];
  if (hi1 < lo1 - 2 * h || hi2 < lo2 - 2 * h) return -1e300;
  for (double g1 = lo1 - h; g1 <= hi1 + h; g1 += h) {
    for (double g2 = lo2 - h; g2 <= hi2 + h; g2 += h) {
      const double g3 = total - g1 - g2;
      const double slack = std::min({g1 - f[1], g2 - f[2], g3 - f[4], g1 + g2 - f[3], g1 + g3 - f[5], g2 + g3 - f[6]});
      best = std::max(best, slack);
    }
  }
  return best;
}

inline SetFunction random_function(int n, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  SetFunction f(n);
  for (Coalition c = 1; c <= opinex::grand_coalition(n); ++c) f.set(c, u(rng));
  return f;
}

inline Eigen::VectorXd random_weights(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  Eigen::VectorXd t(n);
  for (int i = 0; i < n; ++i) t[i] = u(rng);
  return t / t.sum();
}

}  // namespace oracle
