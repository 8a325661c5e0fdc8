#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dpp/harness.hpp"
#include "dpp/metrics.hpp"

using namespace dpp;

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

// Angle via acos of the normalized dot product: an independent route to the same definition.
double angle_acos(double ax, double ay, double bx, double by) {
  const double c = (ax * bx + ay * by) / (std::hypot(ax, ay) * std::hypot(bx, by));
  return std::acos(std::clamp(c, -1.0, 1.0));
}

}  // namespace

TEST(Metrics, CalNorthTowardDecoyIsNegative) {
  const std::vector<Cell> path{{0, 0}, {0, 1}, {0, 2}, {0, 3}};
  EXPECT_NEAR(cal(path, {100000, 0}, {0, 100000}), -kHalfPi, 1e-4);
}

TEST(Metrics, CalNorthTowardGoalIsPositive) {
  const std::vector<Cell> path{{0, 0}, {0, 1}, {0, 2}, {0, 3}};
  EXPECT_NEAR(cal(path, {0, 100000}, {100000, 0}), kHalfPi, 1e-4);
}

TEST(Metrics, CalOnBisectorIsZero) {
  // Goal and decoy mirrored across the vertical line through the path.
  const std::vector<Cell> path{{5, 0}, {5, 1}, {5, 2}, {5, 3}, {5, 4}};
  EXPECT_NEAR(cal(path, {10, 20}, {0, 20}), 0.0, 1e-12);
}

TEST(Metrics, CalIsAntisymmetric) {
  const std::vector<Cell> path{{3, 3}, {4, 3}, {4, 4}, {4, 5}, {3, 5}, {3, 6}};
  const Cell g{20, 15};
  const Cell f{-4, 12};
  EXPECT_NEAR(cal(path, g, f), -cal(path, f, g), 1e-12);
}

TEST(Metrics, CalMatchesAcosOracle) {
  const std::vector<Cell> path{{3, 3}, {4, 3}, {4, 4}, {4, 5}, {3, 5}, {3, 6}, {3, 7}};
  const Cell g{20, 15};
  const Cell f{-4, 12};
  double sum = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const double mx = path[i].x - path[i - 1].x;
    const double my = path[i].y - path[i - 1].y;
    sum += angle_acos(mx, my, f.x - path[i - 1].x, f.y - path[i - 1].y) -
           angle_acos(mx, my, g.x - path[i - 1].x, g.y - path[i - 1].y);
  }
  EXPECT_NEAR(cal(path, g, f), sum / 6.0, 1e-9);
}

TEST(Metrics, CalNeedsTwoStates) {
  const std::vector<Cell> one{{0, 0}};
  EXPECT_THROW(cal(one, {1, 1}, {2, 2}), TooShort);
}

TEST(Metrics, CalReportFraction) {
  std::vector<TrajectoryLog> logs(3);
  logs[0].states = {{0, 0}, {0, 1}, {0, 2}};
  logs[1].states = {{0, 0}, {1, 0}, {2, 0}};
  logs[2].states = {{0, 0}, {0, 1}, {0, 2}};
  const auto r = cal_report(logs, {1000, 0}, {0, 1000});
  EXPECT_NEAR(r.fraction_decoy_biased, 2.0 / 3.0, 1e-12);
  EXPECT_EQ(r.per_trial.size(), 3u);
  EXPECT_NEAR(r.mean, (r.per_trial[0] + r.per_trial[1] + r.per_trial[2]) / 3.0, 1e-12);
}

TEST(Metrics, HeatmapConservesVisits) {
  const GridWorld w(10, 10, {}, 0);
  TrajectoryLog log;
  for (int i = 0; i < 10; ++i) log.states.push_back({i, i % 3});
  std::vector<TrajectoryLog> one{log};
  EXPECT_EQ(accumulate_heatmap(one, w).total(), 10u);
  std::vector<TrajectoryLog> two{log, log};
  const Heatmap a = accumulate_heatmap(one, w);
  const Heatmap b = accumulate_heatmap(two, w);
  for (std::size_t i = 0; i < a.counts.size(); ++i) EXPECT_EQ(b.counts[i], 2 * a.counts[i]);
  EXPECT_EQ(b.trials, 2u);
}

TEST(Metrics, HeatmapCountsRepeats) {
  const GridWorld w(4, 4, {}, 0);
  TrajectoryLog log;
  log.states = {{1, 1}, {1, 2}, {1, 1}};
  std::vector<TrajectoryLog> v{log};
  const Heatmap h = accumulate_heatmap(v, w);
  EXPECT_EQ(h.at(1, 1), 2u);
  EXPECT_EQ(h.at(1, 2), 1u);
}

TEST(Metrics, HeatmapMergeChecksShape) {
  Heatmap a(3, 3);
  Heatmap b(4, 3);
  EXPECT_THROW(a.merge(b), DimensionMismatch);
}

TEST(Metrics, ObstacleCellsNeverVisited) {
  const Scenario s = build("obstacle-exaggeration", 5);
  const auto trials = run_trials(s, 31, 500, 0);
  std::vector<TrajectoryLog> logs;
  std::size_t states = 0;
  for (const auto& t : trials)
    for (const auto& l : t.logs) {
      logs.push_back(l);
      states += l.states.size();
    }
  const Heatmap h = accumulate_heatmap(logs, s.world);
  EXPECT_EQ(h.total(), states);
  ASSERT_FALSE(s.world.obstacles().empty());
  for (const Cell& c : s.world.obstacles()) EXPECT_EQ(h.at(c), 0u) << to_string(c);
}

TEST(Metrics, AmbiguityTrace) {
  const Cell g{0, 0};
  const Cell f{10, 0};
  const std::vector<Cell> bisector{{5, 0}, {5, 3}, {5, -7}};
  for (double v : ambiguity_trace(bisector, g, f)) EXPECT_NEAR(v, 0.0, 1e-12);
  const std::vector<Cell> at_goal{g};
  EXPECT_DOUBLE_EQ(ambiguity_trace(at_goal, g, f)[0], 10.0);
  const std::vector<Cell> path{{1, 2}, {3, 3}, {8, 1}};
  const auto tr = ambiguity_trace(path, g, f);
  for (std::size_t i = 0; i < path.size(); ++i)
    EXPECT_NEAR(tr[i], std::abs(euclidean(path[i], f) - euclidean(path[i], g)), 1e-12);
}

TEST(Metrics, SideCounts) {
  const std::vector<std::size_t> runners{1, 2, 3, 4};
  const std::vector<Cell> all_false{{0, 0}, {10, 0}, {12, 0}, {14, 0}, {16, 0}};
  EXPECT_EQ(side_counts(all_false, runners, 9.0, +1, -1), (SideCounts{4, 0}));
  const std::vector<Cell> three_one{{0, 0}, {10, 0}, {12, 0}, {14, 0}, {3, 0}};
  EXPECT_EQ(side_counts(three_one, runners, 9.0, +1, -1), (SideCounts{3, 1}));
  // The setter (index 0) is ignored even when it sits on the false side.
  const std::vector<Cell> setter_right{{15, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}};
  EXPECT_EQ(side_counts(setter_right, runners, 9.0, +1, -1), (SideCounts{0, 4}));
}

TEST(Metrics, CentrelineTieGoesPositive) {
  EXPECT_EQ(side_of({9, 3}, 9.0), +1);
  EXPECT_EQ(side_of({8, 3}, 9.0), -1);
  const std::vector<std::size_t> runner{0};
  const std::vector<Cell> on_line{{9, 0}};
  EXPECT_EQ(side_counts(on_line, runner, 9.0, +1, -1), (SideCounts{1, 0}));
  EXPECT_EQ(side_counts(on_line, runner, 9.0, -1, +1), (SideCounts{0, 1}));
}

TEST(Metrics, SplitCountsPerStep) {
  const std::vector<std::size_t> runners{0, 1};
  const std::vector<std::vector<Cell>> joint{{{0, 0}, {1, 0}}, {{10, 0}, {1, 0}}, {{10, 0}, {11, 0}}};
  const auto counts = split_counts(joint, runners, 5.0, +1, -1);
  ASSERT_EQ(counts.size(), 3u);
  EXPECT_EQ(counts[0], (SideCounts{0, 2}));
  EXPECT_EQ(counts[1], (SideCounts{1, 1}));
  EXPECT_EQ(counts[2], (SideCounts{2, 0}));
}

TEST(Metrics, DeviationArea) {
  EXPECT_DOUBLE_EQ(distance_to_segment({5, 3}, {0, 0}, {10, 0}), 3.0);
  EXPECT_DOUBLE_EQ(distance_to_segment({-3, 4}, {0, 0}, {10, 0}), 5.0);
  EXPECT_DOUBLE_EQ(distance_to_segment({2, 2}, {1, 1}, {1, 1}), std::sqrt(2.0));
  const std::vector<Cell> straight{{0, 0}, {1, 0}, {2, 0}};
  EXPECT_DOUBLE_EQ(deviation_area(straight, {0, 0}, {2, 0}), 0.0);
  const std::vector<Cell> detour{{0, 0}, {0, 1}, {1, 1}, {2, 1}, {2, 0}};
  EXPECT_DOUBLE_EQ(deviation_area(detour, {0, 0}, {2, 0}), 3.0);
}

TEST(Metrics, EarlyDecoyApproach) {
  const std::vector<Cell> path{{0, 0}, {0, 1}, {0, 2}, {0, 3}, {1, 3}, {2, 3}, {3, 3}, {4, 3}, {5, 3}};
  EXPECT_DOUBLE_EQ(early_decoy_approach(path, {0, 10}, 0.25), 2.0);
  EXPECT_DOUBLE_EQ(early_decoy_approach(path, {0, 10}, 0.0), 0.0);
}
