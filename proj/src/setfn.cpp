#include "opinex/setfn.hpp"

#include "opinex/text.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace opinex {

std::string format_double(double value) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buffer, end);
}

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view text, char delimiter) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(delimiter, start);
    if (pos == std::string_view::npos) {
      fields.push_back(text.substr(start));
      return fields;
    }
    fields.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_double(std::string_view text, std::string_view context) {
  const auto field = trim(text);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ParseError(std::string(context) + ": expected a number, got '" + std::string(field) + "'");
  }
  return value;
}

long long parse_integer(std::string_view text, std::string_view context) {
  const auto field = trim(text);
  long long value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ParseError(std::string(context) + ": expected an integer, got '" + std::string(field) + "'");
  }
  return value;
}

void check_player_count(int n) {
  if (n < 1 || n > kMaxPlayers) {
    throw std::invalid_argument("player count must lie in [1, " + std::to_string(kMaxPlayers) +
                                "], got " + std::to_string(n));
  }
}

std::size_t subset_index(Coalition c, int n) {
  check_player_count(n);
  if (c == 0 || c >= grand_coalition(n)) {
    throw std::domain_error("subset_index: coalition " + std::to_string(c) +
                            " is not a proper nonempty subset of " + std::to_string(n) + " players");
  }
  return static_cast<std::size_t>(c) - 1;
}

Coalition subset_at(std::size_t index, int n) {
  check_player_count(n);
  if (index >= restricted_size(n)) {
    throw std::out_of_range("subset_at: index " + std::to_string(index) + " out of range");
  }
  return static_cast<Coalition>(index + 1);
}

SetFunction::SetFunction(int n) : n_(n) {
  check_player_count(n);
  values_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(coalition_count(n)));
}

SetFunction::SetFunction(int n, Eigen::VectorXd values) : n_(n), values_(std::move(values)) {
  check_player_count(n);
  if (static_cast<std::size_t>(values_.size()) != coalition_count(n)) {
    throw std::invalid_argument("SetFunction: expected " + std::to_string(coalition_count(n)) +
                                " values, got " + std::to_string(values_.size()));
  }
  if (values_[0] != 0.0) throw std::invalid_argument("SetFunction: value of the empty coalition must be 0");
  if (!values_.allFinite()) throw std::invalid_argument("SetFunction: values must be finite");
}

SetFunction SetFunction::from_restricted(int n, const Eigen::VectorXd& restricted, double grand) {
  SetFunction f(n);
  if (n == 1) {
    if (restricted.size() != 0) throw std::invalid_argument("from_restricted: n=1 has no proper subsets");
  } else {
    f.assign_restricted(restricted);
  }
  f.values_[f.values_.size() - 1] = grand;
  return f;
}

SetFunction SetFunction::from_cardinality(int n, const std::function<double(int)>& g) {
  SetFunction f(n);
  for (Coalition c = 1; c <= grand_coalition(n); ++c) f.values_[c] = g(cardinality(c));
  return f;
}

void SetFunction::set(Coalition c, double value) {
  if (c == 0) throw std::invalid_argument("SetFunction::set: the empty coalition is fixed at 0");
  if (c > grand_coalition(n_)) throw std::out_of_range("SetFunction::set: coalition out of range");
  values_[c] = value;
}

Eigen::VectorXd SetFunction::restricted() const {
  const auto m = static_cast<Eigen::Index>(restricted_size(n_));
  return values_.segment(1, m);
}

void SetFunction::assign_restricted(const Eigen::VectorXd& restricted) {
  const auto m = static_cast<Eigen::Index>(restricted_size(n_));
  if (restricted.size() != m) {
    throw std::invalid_argument("restricted vector has length " + std::to_string(restricted.size()) +
                                ", expected " + std::to_string(m));
  }
  values_.segment(1, m) = restricted;
}

bool SetFunction::is_normalized(double tol) const { return std::abs(grand() - 1.0) <= tol; }

SetFunction& SetFunction::operator+=(const SetFunction& other) {
  if (other.n_ != n_) throw std::invalid_argument("SetFunction: player counts differ");
  values_ += other.values_;
  return *this;
}

SetFunction& SetFunction::operator-=(const SetFunction& other) {
  if (other.n_ != n_) throw std::invalid_argument("SetFunction: player counts differ");
  values_ -= other.values_;
  return *this;
}

SetFunction& SetFunction::operator*=(double scale) {
  values_ *= scale;
  return *this;
}

SetFunction operator+(SetFunction a, const SetFunction& b) { return a += b; }
SetFunction operator-(SetFunction a, const SetFunction& b) { return a -= b; }
SetFunction operator*(double scale, SetFunction f) { return f *= scale; }

SetFunction power_family(int n, double exponent) {
  return SetFunction::from_cardinality(
      n, [n, exponent](int size) { return std::pow(static_cast<double>(size) / n, exponent); });
}

namespace {

bool incremental_test(const SetFunction& f, bool strict, double tol) {
  const int n = f.players();
  const Coalition full = grand_coalition(n);
  for (Coalition s = 0; s <= full; ++s) {
    for (int i = 0; i < n; ++i) {
      if (contains(s, i)) continue;
      const Coalition si = s | (Coalition{1} << i);
      for (int j = i + 1; j < n; ++j) {
        if (contains(s, j)) continue;
        const Coalition sj = s | (Coalition{1} << j);
        const double second = f[si | sj] - f[si] - f[sj] + f[s];
        if (strict ? !(second > tol) : second < -tol) return false;
      }
    }
  }
  return true;
}

bool pairwise_test(const SetFunction& f, bool strict, double tol) {
  const Coalition full = grand_coalition(f.players());
  for (Coalition x = 0; x <= full; ++x) {
    for (Coalition y = x + 1; y <= full; ++y) {
      // Comparable pairs satisfy the inequality with equality for every f.
      if ((x & y) == x || (x & y) == y) continue;
      const double gap = f[x | y] + f[x & y] - f[x] - f[y];
      if (strict ? !(gap > tol) : gap < -tol) return false;
    }
  }
  return true;
}

}  // namespace

bool is_supermodular(const SetFunction& f, bool strict, double tol, SupermodularityTest method) {
  if (tol < 0.0) throw std::invalid_argument("is_supermodular: tolerance must be nonnegative");
  return method == SupermodularityTest::kPairwise ? pairwise_test(f, strict, tol)
                                                  : incremental_test(f, strict, tol);
}

double supermodularity_margin(const SetFunction& f) {
  const int n = f.players();
  double margin = std::numeric_limits<double>::infinity();
  for (Coalition s = 0; s <= grand_coalition(n); ++s) {
    for (int i = 0; i < n; ++i) {
      if (contains(s, i)) continue;
      const Coalition si = s | (Coalition{1} << i);
      for (int j = i + 1; j < n; ++j) {
        if (contains(s, j)) continue;
        const Coalition sj = s | (Coalition{1} << j);
        margin = std::min(margin, f[si | sj] - f[si] - f[sj] + f[s]);
      }
    }
  }
  return margin;
}

SetFunction weighted_average(std::span<const SetFunction> fs, std::span<const double> weights) {
  if (fs.empty()) throw std::invalid_argument("weighted_average: no set functions");
  if (fs.size() != weights.size()) {
    throw std::invalid_argument("weighted_average: " + std::to_string(fs.size()) + " functions but " +
                                std::to_string(weights.size()) + " weights");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("weighted_average: weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("weighted_average: weights sum to " + format_double(total) + ", not 1");
  }
  const int n = fs.front().players();
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(fs.front().size()));
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (fs[i].players() != n) throw std::invalid_argument("weighted_average: player counts differ");
    acc += weights[i] * fs[i].values();
  }
  return SetFunction(n, std::move(acc));
}

SetFunction weighted_average(std::span<const SetFunction> fs, const Eigen::VectorXd& weights) {
  return weighted_average(fs, std::span<const double>(weights.data(), static_cast<std::size_t>(weights.size())));
}

void GroundTruthSpec::validate() const {
  if (!truth.is_normalized()) throw std::invalid_argument("ground truth must satisfy v(N) = 1");
  if (!is_supermodular(truth, true)) throw std::invalid_argument("ground truth must be strictly supermodular");
  for (double s : sigmas) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw std::invalid_argument("sigmas must be finite and nonnegative");
  }
}

SetFunction sample_supermodular_opinion(const GroundTruthSpec& spec, int player, std::mt19937_64& rng,
                                        const SamplerOptions& options) {
  if (player < 0 || static_cast<std::size_t>(player) >= spec.sigmas.size()) {
    throw std::out_of_range("sample_supermodular_opinion: no sigma for player " + std::to_string(player));
  }
  const double sigma = spec.sigmas[static_cast<std::size_t>(player)];
  if (sigma == 0.0) return spec.truth;

  const int n = spec.truth.players();
  const Coalition last = options.perturb_grand ? grand_coalition(n) : grand_coalition(n) - 1;
  std::normal_distribution<double> noise(0.0, sigma);
  Eigen::VectorXd candidate = spec.truth.values();
  for (std::size_t attempt = 0; attempt < options.max_attempts; ++attempt) {
    for (Coalition c = 1; c <= last; ++c) candidate[c] = spec.truth[c] + noise(rng);
    SetFunction sample(n, candidate);
    if (is_supermodular(sample, false, 0.0)) return sample;
  }
  throw SamplerExhausted("no supermodular sample for player " + std::to_string(player) + " after " +
                         std::to_string(options.max_attempts) + " attempts; sigma=" + format_double(sigma) +
                         " is too large for the truth's supermodularity margin " +
                         format_double(supermodularity_margin(spec.truth)));
}

void write_set_function(std::ostream& os, const SetFunction& f) {
  os << "n=" << f.players() << '\n';
  for (Coalition c = 0; c <= grand_coalition(f.players()); ++c) {
    os << c << ' ' << format_double(f[c]) << '\n';
  }
}

SetFunction read_set_function(std::istream& is, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  int n = 0;
  std::vector<char> seen;
  Eigen::VectorXd values;
  auto where = [&] { return source + ":" + std::to_string(line_no); };

  while (std::getline(is, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    if (n == 0) {
      if (text.substr(0, 2) != "n=") throw ParseError(where() + ": expected header 'n=<count>'");
      const auto count = parse_integer(text.substr(2), where());
      if (count < 1 || count > kMaxPlayers) throw ParseError(where() + ": player count out of range");
      n = static_cast<int>(count);
      values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(coalition_count(n)));
      seen.assign(coalition_count(n), 0);
      continue;
    }
    const auto space = text.find_first_of(" \t");
    if (space == std::string_view::npos) throw ParseError(where() + ": expected 'bitmask value'");
    const auto mask = parse_integer(text.substr(0, space), where());
    if (mask < 0 || static_cast<std::size_t>(mask) >= coalition_count(n)) {
      throw ParseError(where() + ": bitmask " + std::to_string(mask) + " out of range for n=" + std::to_string(n));
    }
    if (seen[static_cast<std::size_t>(mask)]) throw ParseError(where() + ": duplicate bitmask " + std::to_string(mask));
    seen[static_cast<std::size_t>(mask)] = 1;
    values[mask] = parse_double(text.substr(space + 1), where());
    if (mask == 0 && values[0] != 0.0) throw ParseError(where() + ": the empty coalition must have value 0");
  }
  if (n == 0) throw ParseError(source + ": missing header 'n=<count>'");
  for (std::size_t c = 0; c < seen.size(); ++c) {
    if (!seen[c]) throw ParseError(source + ": missing value for bitmask " + std::to_string(c));
  }
  return SetFunction(n, std::move(values));
}

SetFunction load_set_function(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open set function file '" + path + "'");
  return read_set_function(in, path);
}

void save_set_function(const std::string& path, const SetFunction& f) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write set function file '" + path + "'");
  write_set_function(out, f);
  if (!out) throw std::runtime_error("I/O error while writing '" + path + "'");
}

}  // namespace opinex
