#ifndef OPINEX_SETFN_HPP
#define OPINEX_SETFN_HPP

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace opinex {

/// Coalitions are bitmasks: bit i set means player i (0-based) is a member.
using Coalition = std::uint32_t;

inline constexpr int kMaxPlayers = 20;

/// Default margin used for strict inequalities on set functions.
inline constexpr double kStrictTolerance = 1e-9;

constexpr Coalition grand_coalition(int n) { return (Coalition{1} << n) - 1; }
constexpr std::size_t coalition_count(int n) { return std::size_t{1} << n; }
/// Number of proper nonempty coalitions, i.e. the length m = 2^n - 2 of a restricted vector.
constexpr std::size_t restricted_size(int n) { return coalition_count(n) - 2; }

inline int cardinality(Coalition c) { return __builtin_popcount(c); }
constexpr bool contains(Coalition c, int player) { return (c >> player) & 1U; }

/// Position of a proper nonempty coalition in the restricted vector (ascending bitmask order).
/// Throws std::domain_error for the empty set and the grand coalition.
std::size_t subset_index(Coalition c, int n);

/// Inverse of subset_index.
Coalition subset_at(std::size_t index, int n);

void check_player_count(int n);

/// A payoff function over all 2^n coalitions, stored densely by bitmask.
/// values()[0] (the empty coalition) is always zero.
class SetFunction {
 public:
  SetFunction() = default;
  explicit SetFunction(int n);
  SetFunction(int n, Eigen::VectorXd values);

  /// Builds v from its restricted vector plus v(N); v(empty) = 0.
  static SetFunction from_restricted(int n, const Eigen::VectorXd& restricted, double grand);
  /// v(C) = g(|C|) with g(0) forced to zero.
  static SetFunction from_cardinality(int n, const std::function<double(int)>& g);

  int players() const { return n_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }

  double operator[](Coalition c) const { return values_[static_cast<Eigen::Index>(c)]; }
  void set(Coalition c, double value);

  double grand() const { return values_[values_.size() - 1]; }
  const Eigen::VectorXd& values() const { return values_; }

  /// Entries for proper nonempty coalitions, in subset_index order.
  Eigen::VectorXd restricted() const;
  /// Replaces the proper nonempty entries; leaves v(empty) and v(N) untouched.
  void assign_restricted(const Eigen::VectorXd& restricted);

  bool is_normalized(double tol = 1e-12) const;

  SetFunction& operator+=(const SetFunction& other);
  SetFunction& operator-=(const SetFunction& other);
  SetFunction& operator*=(double scale);

  friend bool operator==(const SetFunction& a, const SetFunction& b) {
    return a.n_ == b.n_ && a.values_ == b.values_;
  }

 private:
  int n_ = 0;
  Eigen::VectorXd values_;
};

SetFunction operator+(SetFunction a, const SetFunction& b);
SetFunction operator-(SetFunction a, const SetFunction& b);
SetFunction operator*(double scale, SetFunction f);

/// (|C|/n)^exponent. Strictly supermodular for exponent > 1, modular at 1.
SetFunction power_family(int n, double exponent);

enum class SupermodularityTest {
  kIncremental,  // increasing marginal contributions, via local second differences
  kPairwise,     // f(X|Y) + f(X&Y) >= f(X) + f(Y) over all pairs; O(4^n)
};

/// Non-strict: every inequality holds up to -tol. Strict: every non-trivial
/// inequality holds with margin greater than tol.
bool is_supermodular(const SetFunction& f, bool strict = false, double tol = kStrictTolerance,
                     SupermodularityTest method = SupermodularityTest::kIncremental);

/// Smallest local second difference f(S+i+j) - f(S+i) - f(S+j) + f(S). +inf for n < 2.
double supermodularity_margin(const SetFunction& f);

/// Elementwise convex combination. Weights must be nonnegative and sum to one within 1e-9.
SetFunction weighted_average(std::span<const SetFunction> fs, std::span<const double> weights);
SetFunction weighted_average(std::span<const SetFunction> fs, const Eigen::VectorXd& weights);

struct GroundTruthSpec {
  SetFunction truth;
  std::vector<double> sigmas;  // per-player standard deviation

  /// Requires a normalized, strictly supermodular truth and nonnegative sigmas.
  void validate() const;
};

struct SamplerOptions {
  bool perturb_grand = true;
  std::size_t max_attempts = 100000;
};

class SamplerExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Truth plus i.i.d. N(0, sigma_player^2) noise on every proper nonempty entry
/// (and on v(N) when perturb_grand), resampled until supermodular.
SetFunction sample_supermodular_opinion(const GroundTruthSpec& spec, int player, std::mt19937_64& rng,
                                        const SamplerOptions& options = {});

// Text format: "n=<count>" then one "bitmask value" line per coalition, ascending.
void write_set_function(std::ostream& os, const SetFunction& f);
SetFunction read_set_function(std::istream& is, const std::string& source = "<stream>");
SetFunction load_set_function(const std::string& path);
void save_set_function(const std::string& path, const SetFunction& f);

}  // namespace opinex

#endif  // OPINEX_SETFN_HPP
