#include "opinex/simulation.hpp"

#include "opinex/text.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace opinex {

std::string trace_header(int n) {
  const std::size_t m = restricted_size(n);
  std::string h = "kind,k,player,entry,v,x,u,disutility,cumulative_disutility";
  for (std::size_t e = 0; e < m; ++e) h += ",vhat_" + std::to_string(e);
  h += ",vhat_grand";
  for (int i = 0; i < n; ++i) h += ",shapley_" + std::to_string(i);
  for (int i = 0; i < n; ++i) h += ",reward_" + std::to_string(i);
  for (int i = 0; i < n; ++i) h += ",grand_" + std::to_string(i);
  return h;
}

void emit_trace(std::ostream& os, const SimulationTrace& trace) {
  const int n = trace.players;
  const std::size_t m = restricted_size(n);
  const std::size_t aggregate_cols = m + 1 + 3 * static_cast<std::size_t>(n);
  const std::string opinion_padding(2 + aggregate_cols, ',');
  os << trace_header(n) << '\n';
  for (const auto& s : trace.steps) {
    for (int i = 0; i < n; ++i) {
      const auto& v = s.truth[static_cast<std::size_t>(i)];
      const auto& x = s.revealed[static_cast<std::size_t>(i)];
      for (std::size_t e = 0; e < m; ++e) {
        const Coalition c = subset_at(e, n);
        os << "opinion," << s.k << ',' << i << ',' << e << ',' << format_double(v[c]) << ',' << format_double(x[c])
           << ',' << format_double(x[c] - v[c]) << opinion_padding << '\n';
      }
    }
    os << "aggregate," << s.k << ",,,,,," << format_double(s.disutility) << ','
       << format_double(s.cumulative_disutility);
    for (std::size_t e = 0; e < m; ++e) os << ',' << format_double(s.average[subset_at(e, n)]);
    os << ',' << format_double(s.average.grand());
    for (int i = 0; i < n; ++i) os << ',' << format_double(s.shapley[i]);
    for (int i = 0; i < n; ++i) os << ',' << format_double(s.rewards[i]);
    for (int i = 0; i < n; ++i) os << ',' << format_double(s.truth[static_cast<std::size_t>(i)].grand());
    os << '\n';
  }
}

void emit_trace(const std::string& path, const SimulationTrace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open trace file '" + path + "' for writing");
  emit_trace(out, trace);
  out.flush();
  if (!out) throw std::runtime_error("I/O error while writing trace file '" + path + "'");
}

SimulationTrace read_trace(std::istream& is, const std::string& source) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(is, line)) throw ParseError(source + ": empty trace file");
  const auto header = split(trim(line), ',');
  int n = 0;
  for (auto h : header) {
    if (h.substr(0, 8) == "shapley_") ++n;
  }
  if (n < 1 || std::string(trim(line)) != trace_header(n)) throw ParseError(source + ":1: unrecognized trace header");
  const std::size_t m = restricted_size(n);

  struct Partial {
    std::vector<Eigen::VectorXd> v, x;
    bool has_aggregate = false;
    TraceStep step;
    Eigen::VectorXd grand;
  };
  std::map<int, Partial> steps;
  auto init = [&](Partial& p) {
    if (p.v.empty()) {
      p.v.assign(static_cast<std::size_t>(n), Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m)));
      p.x = p.v;
    }
  };

  while (std::getline(is, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    const auto f = split(trim(line), ',');
    if (f.size() != header.size()) throw ParseError(where + ": expected " + std::to_string(header.size()) + " fields");
    const int k = static_cast<int>(parse_integer(f[1], where));
    auto& p = steps[k];
    init(p);
    if (f[0] == "opinion") {
      const auto i = parse_integer(f[2], where);
      const auto e = parse_integer(f[3], where);
      if (i < 0 || i >= n || e < 0 || static_cast<std::size_t>(e) >= m) throw ParseError(where + ": index out of range");
      p.v[static_cast<std::size_t>(i)][e] = parse_double(f[4], where);
      p.x[static_cast<std::size_t>(i)][e] = parse_double(f[5], where);
    } else if (f[0] == "aggregate") {
      p.has_aggregate = true;
      auto& s = p.step;
      s.k = k;
      s.disutility = parse_double(f[7], where);
      s.cumulative_disutility = parse_double(f[8], where);
      std::size_t col = 9;
      Eigen::VectorXd avg(static_cast<Eigen::Index>(m));
      for (std::size_t e = 0; e < m; ++e) avg[static_cast<Eigen::Index>(e)] = parse_double(f[col++], where);
      const double avg_grand = parse_double(f[col++], where);
      s.average = SetFunction::from_restricted(n, avg, avg_grand);
      s.shapley.resize(n);
      s.rewards.resize(n);
      p.grand.resize(n);
      for (int i = 0; i < n; ++i) s.shapley[i] = parse_double(f[col++], where);
      for (int i = 0; i < n; ++i) s.rewards[i] = parse_double(f[col++], where);
      for (int i = 0; i < n; ++i) p.grand[i] = parse_double(f[col++], where);
    } else {
      throw ParseError(where + ": unknown row kind '" + std::string(f[0]) + "'");
    }
  }

  SimulationTrace trace;
  trace.players = n;
  int expected = 0;
  for (auto& [k, p] : steps) {
    if (k != expected++) throw ParseError(source + ": step indices are not contiguous from 0");
    if (!p.has_aggregate) throw ParseError(source + ": step " + std::to_string(k) + " has no aggregate row");
    for (int i = 0; i < n; ++i) {
      p.step.truth.push_back(SetFunction::from_restricted(n, p.v[static_cast<std::size_t>(i)], p.grand[i]));
      p.step.revealed.push_back(SetFunction::from_restricted(n, p.x[static_cast<std::size_t>(i)], p.grand[i]));
    }
    trace.steps.push_back(std::move(p.step));
  }
  return trace;
}

}  // namespace opinex
