#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "dpp/cost.hpp"
#include "dpp/horizon.hpp"

using namespace dpp;

namespace {

// Independent oracle: decode every base-4 integer into a sequence and keep the
// ones whose unit steps stay inside the margin box.
std::vector<ActionSequence> brute_force(const GridWorld& w, Cell s, int K) {
  std::vector<ActionSequence> out;
  int total = 1;
  for (int k = 0; k < K; ++k) total *= 4;
  for (int code = 0; code < total; ++code) {
    ActionSequence seq;
    int c = code;
    for (int k = 0; k < K; ++k) {
      seq.insert(seq.begin(), static_cast<Action>(c % 4));
      c /= 4;
    }
    Cell p = s;
    bool ok = true;
    for (Action a : seq) {
      p = step(p, a);
      if (p.x < w.boundary_margin() || p.y < w.boundary_margin() || p.x >= w.width() - w.boundary_margin() ||
          p.y >= w.height() - w.boundary_margin())
        ok = false;
    }
    if (ok) out.push_back(seq);
  }
  return out;
}

}  // namespace

TEST(Horizon, InteriorCountsArePowersOfFour) {
  const GridWorld w(9, 9, {}, 0);
  EXPECT_EQ(generate_candidates(w, {4, 4}, 1).size(), 4u);
  EXPECT_EQ(generate_candidates(w, {4, 4}, 2).size(), 16u);
  EXPECT_EQ(generate_candidates(w, {4, 4}, 3).size(), 64u);
}

TEST(Horizon, BoundaryCountsMatchBruteForce) {
  const GridWorld w(9, 9, {}, 0);
  for (int K = 1; K <= 3; ++K)
    for (int x = 0; x < 9; ++x)
      for (int y = 0; y < 9; ++y) {
        const auto set = generate_candidates(w, {x, y}, K);
        const auto oracle = brute_force(w, {x, y}, K);
        ASSERT_EQ(set.size(), oracle.size()) << "K=" << K << " at " << x << "," << y;
        for (std::size_t i = 0; i < set.size(); ++i) EXPECT_EQ(set[i].actions, oracle[i]);
      }
}

TEST(Horizon, CornerK2MatchesOracle) {
  const GridWorld w(6, 6, {}, 0);
  EXPECT_EQ(generate_candidates(w, {0, 0}, 2).size(), brute_force(w, {0, 0}, 2).size());
  EXPECT_EQ(generate_candidates(w, {0, 0}, 2).size(), 6u);
}

TEST(Horizon, ItemsAreLexicographicAndUnique) {
  const GridWorld w(9, 9, {}, 0);
  const auto set = generate_candidates(w, {1, 1}, 3);
  std::set<ActionSequence> seen;
  for (std::size_t i = 0; i < set.size(); ++i) {
    EXPECT_TRUE(seen.insert(set[i].actions).second);
    if (i > 0) {
      EXPECT_TRUE(detail::lexicographic_less(set[i - 1].actions, set[i].actions));
    }
  }
}

TEST(Horizon, TerminalAndPathMatchRollout) {
  const GridWorld w(9, 9, {}, 0);
  const auto set = generate_candidates(w, {3, 3}, 3);
  for (const auto& c : set.items) {
    const auto r = rollout(w, {3, 3}, c.actions);
    EXPECT_EQ(r.terminal, c.terminal);
    EXPECT_EQ(r.path, c.path);
    EXPECT_EQ(c.path.back(), c.terminal);
    EXPECT_EQ(c.path.size(), 3u);
  }
}

TEST(Horizon, RolloutExamples) {
  const GridWorld w(10, 10, {}, 0);
  const ActionSequence eenn{Action::East, Action::East, Action::North};
  const auto r = rollout(w, {0, 0}, eenn);
  EXPECT_EQ(r.terminal, (Cell{2, 1}));
  EXPECT_EQ(r.path, (std::vector<Cell>{{1, 0}, {2, 0}, {2, 1}}));
  const ActionSequence ns{Action::North, Action::South};
  EXPECT_EQ(rollout(w, {5, 5}, ns).terminal, (Cell{5, 5}));
  EXPECT_THROW(rollout(w, {0, 0}, ActionSequence{Action::South}), OutOfBounds);
}

TEST(Horizon, RandomRolloutsMatchRepeatedApply) {
  const GridWorld w(30, 30, {}, 0);
  std::mt19937 gen(12345);
  std::uniform_int_distribution<int> pos(3, 26);
  std::uniform_int_distribution<int> act(0, 3);
  for (int trial = 0; trial < 200; ++trial) {
    Cell s{pos(gen), pos(gen)};
    ActionSequence seq{static_cast<Action>(act(gen)), static_cast<Action>(act(gen)), static_cast<Action>(act(gen))};
    Cell p = s;
    for (Action a : seq) p = Cell{p.x + offset(a).x, p.y + offset(a).y};
    EXPECT_EQ(rollout(w, s, seq).terminal, p);
  }
}

TEST(Horizon, ObstacleExclusion) {
  const GridWorld w(9, 9, {{5, 4}, {3, 4}, {4, 5}}, 0);
  const auto penalized = generate_candidates(w, {4, 4}, 1);
  EXPECT_EQ(penalized.size(), 4u);
  const auto excluded = generate_candidates(w, {4, 4}, 1, {}, ObstacleMode::Exclude);
  ASSERT_EQ(excluded.size(), 1u);
  EXPECT_EQ(excluded[0].terminal, (Cell{4, 3}));
}

TEST(Horizon, WalledInUnderExclusionThrows) {
  const GridWorld w(9, 9, {{5, 4}, {3, 4}, {4, 5}, {4, 3}}, 0);
  EXPECT_THROW(generate_candidates(w, {4, 4}, 2, {}, ObstacleMode::Exclude), EmptyCandidateSet);
}

TEST(Horizon, InvalidInputs) {
  const GridWorld w(9, 9, {}, 1);
  EXPECT_THROW(generate_candidates(w, {4, 4}, 0), InvalidArgument);
  EXPECT_THROW(generate_candidates(w, {0, 4}, 1), OutOfBounds);
  EXPECT_THROW(generate_candidates(w, {4, 4}, 2, PrunePolicy::beam(3)), InvalidArgument);
}

TEST(Horizon, BeamIsSubsetOfExhaustive) {
  const GridWorld w(15, 15, {}, 0);
  const Cell goal{12, 12};
  const PrefixScorer scorer = [&](const Cell&, std::span<const Action>, std::span<const Cell> path) {
    return euclidean(path.back(), goal);
  };
  const auto full = generate_candidates(w, {5, 5}, 3);
  const auto beam = generate_candidates(w, {5, 5}, 3, PrunePolicy::beam(5), ObstacleMode::Penalize, scorer);
  EXPECT_LE(beam.size(), 5u);
  for (const auto& c : beam.items) {
    const bool found = std::any_of(full.items.begin(), full.items.end(),
                                   [&](const Candidate& f) { return f.actions == c.actions; });
    EXPECT_TRUE(found);
  }
}

TEST(Horizon, BeamKeepsBestPrefixesWithLexicographicTies) {
  const GridWorld w(15, 15, {}, 0);
  const Cell goal{12, 5};
  const PrefixScorer scorer = [&](const Cell&, std::span<const Action>, std::span<const Cell> path) {
    return euclidean(path.back(), goal);
  };
  const auto beam = generate_candidates(w, {5, 5}, 1, PrunePolicy::beam(1), ObstacleMode::Penalize, scorer);
  ASSERT_EQ(beam.size(), 1u);
  EXPECT_EQ(beam[0].actions, ActionSequence{Action::East});

  // North and South tie for a goal straight east after the first step is fixed; N wins.
  const PrefixScorer flat = [](const Cell&, std::span<const Action>, std::span<const Cell>) { return 0.0; };
  const auto tie = generate_candidates(w, {5, 5}, 2, PrunePolicy::beam(2), ObstacleMode::Penalize, flat);
  ASSERT_EQ(tie.size(), 2u);
  EXPECT_EQ(tie[0].actions, (ActionSequence{Action::North, Action::North}));
  EXPECT_EQ(tie[1].actions, (ActionSequence{Action::North, Action::East}));
}

TEST(Horizon, SizeNeverExceedsBranchingPower) {
  const GridWorld w(7, 7, {}, 0);
  for (int x = 0; x < 7; ++x)
    for (int y = 0; y < 7; ++y) EXPECT_LE(generate_candidates(w, {x, y}, 3).size(), 64u);
}
