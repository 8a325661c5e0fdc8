#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dpp/errors.hpp"
#include "dpp/world.hpp"

namespace dpp {

using ActionSequence = std::vector<Action>;

inline std::string to_string(const ActionSequence& seq) {
  std::string out;
  out.reserve(seq.size());
  for (Action a : seq) out.push_back(action_letter(a));
  return out;
}

struct Candidate {
  ActionSequence actions;
  Cell terminal;
  std::vector<Cell> path;  // the K visited cells, origin excluded
};

struct CandidateSet {
  Cell origin;
  int horizon = 0;
  std::vector<Candidate> items;

  std::size_t size() const noexcept { return items.size(); }
  bool empty() const noexcept { return items.empty(); }
  const Candidate& operator[](std::size_t i) const { return items[i]; }
};

// Scores a partial sequence for beam truncation. Lower is better; +inf sorts last.
using PrefixScorer =
    std::function<double(const Cell& origin, std::span<const Action> prefix, std::span<const Cell> path)>;

struct PrunePolicy {
  enum class Mode { Exhaustive, Beam };

  Mode mode = Mode::Exhaustive;
  std::size_t beam_width = 0;  // used iff mode == Beam; ranking comes from the caller's scorer

  bool operator==(const PrunePolicy&) const = default;

  static PrunePolicy exhaustive() { return {}; }
  static PrunePolicy beam(std::size_t width) { return {Mode::Beam, width}; }
};

struct RolloutResult {
  Cell terminal;
  std::vector<Cell> path;
};

inline RolloutResult rollout(const GridWorld& world, const Cell& s, std::span<const Action> seq) {
  RolloutResult out{s, {}};
  out.path.reserve(seq.size());
  for (Action a : seq) {
    out.terminal = apply(world, out.terminal, a);
    out.path.push_back(out.terminal);
  }
  return out;
}

namespace detail {

inline bool lexicographic_less(const ActionSequence& a, const ActionSequence& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

inline void enumerate(const GridWorld& world, ObstacleMode mode, int K, Candidate& partial,
                      std::vector<Candidate>& out) {
  if (static_cast<int>(partial.actions.size()) == K) {
    out.push_back(partial);
    return;
  }
  const Cell here = partial.path.empty() ? partial.terminal : partial.path.back();
  for (const Successor& next : neighbors(world, here, mode)) {
    partial.actions.push_back(next.action);
    partial.path.push_back(next.cell);
    enumerate(world, mode, K, partial, out);
    partial.actions.pop_back();
    partial.path.pop_back();
  }
}

}  // namespace detail

// Feasible K-step sequences from s, in lexicographic action order (N<E<S<W).
inline CandidateSet generate_candidates(const GridWorld& world, const Cell& s, int K,
                                        const PrunePolicy& prune = {},
                                        ObstacleMode mode = ObstacleMode::Penalize,
                                        const PrefixScorer& scorer = {}) {
  if (K < 1) throw InvalidArgument("horizon K must be >= 1");
  if (!world.in_bounds(s)) throw OutOfBounds("origin " + to_string(s) + " outside the grid");

  CandidateSet set{s, K, {}};
  if (prune.mode == PrunePolicy::Mode::Exhaustive) {
    Candidate partial{{}, s, {}};
    partial.actions.reserve(K);
    partial.path.reserve(K);
    detail::enumerate(world, mode, K, partial, set.items);
  } else {
    if (prune.beam_width < 1) throw InvalidArgument("beam_width must be >= 1");
    if (!scorer) throw InvalidArgument("beam pruning needs a prefix scorer");
    std::vector<Candidate> beam{Candidate{{}, s, {}}};
    for (int depth = 0; depth < K; ++depth) {
      std::vector<std::pair<double, Candidate>> expanded;
      for (const Candidate& c : beam) {
        const Cell here = c.path.empty() ? s : c.path.back();
        for (const Successor& next : neighbors(world, here, mode)) {
          Candidate grown = c;
          grown.actions.push_back(next.action);
          grown.path.push_back(next.cell);
          double score = scorer(s, grown.actions, grown.path);
          if (std::isnan(score)) score = std::numeric_limits<double>::infinity();
          expanded.emplace_back(score, std::move(grown));
        }
      }
      std::stable_sort(expanded.begin(), expanded.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return detail::lexicographic_less(a.second.actions, b.second.actions);
      });
      if (expanded.size() > prune.beam_width) expanded.resize(prune.beam_width);
      beam.clear();
      for (auto& [score, c] : expanded) beam.push_back(std::move(c));
    }
    std::sort(beam.begin(), beam.end(), [](const Candidate& a, const Candidate& b) {
      return detail::lexicographic_less(a.actions, b.actions);
    });
    set.items = std::move(beam);
  }

  for (Candidate& c : set.items) c.terminal = c.path.back();
  if (set.items.empty())
    throw EmptyCandidateSet("no feasible " + std::to_string(K) + "-step sequence from " + to_string(s));
  return set;
}

}  // namespace dpp
