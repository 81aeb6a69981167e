#ifndef OPINEX_RANDOM_HPP
#define OPINEX_RANDOM_HPP

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace opinex {

/// Independent stream keyed by a master seed and a path such as {tag, n, trial}.
inline std::mt19937_64 derive_stream(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * (path.size() + 1));
  auto push = [&words](std::uint64_t x) {
    words.push_back(static_cast<std::uint32_t>(x));
    words.push_back(static_cast<std::uint32_t>(x >> 32));
  };
  push(master);
  for (auto x : path) push(x);
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

// Stream tags keep the purposes of derived streams apart.
inline constexpr std::uint64_t kStreamInfluence = 1;
inline constexpr std::uint64_t kStreamOpinions = 2;
inline constexpr std::uint64_t kStreamAgents = 3;
inline constexpr std::uint64_t kStreamCoreTrials = 4;

}  // namespace opinex

#endif  // OPINEX_RANDOM_HPP
