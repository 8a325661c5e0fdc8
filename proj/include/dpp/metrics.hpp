#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "dpp/errors.hpp"
#include "dpp/planner_single.hpp"
#include "dpp/world.hpp"

namespace dpp {

struct Heatmap {
  int width = 0;
  int height = 0;
  std::vector<std::uint64_t> counts;  // row-major, index y * width + x
  std::size_t trials = 0;

  Heatmap() = default;
  Heatmap(int w, int h) : width(w), height(h), counts(static_cast<std::size_t>(w) * h, 0) {}

  std::uint64_t at(int x, int y) const { return counts[static_cast<std::size_t>(y) * width + x]; }
  std::uint64_t& at(int x, int y) { return counts[static_cast<std::size_t>(y) * width + x]; }
  std::uint64_t at(const Cell& c) const { return at(c.x, c.y); }
  std::uint64_t& at(const Cell& c) { return at(c.x, c.y); }

  std::uint64_t total() const {
    std::uint64_t sum = 0;
    for (auto c : counts) sum += c;
    return sum;
  }

  void merge(const Heatmap& other) {
    if (other.width != width || other.height != height) throw DimensionMismatch("heatmap sizes differ");
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
    trials += other.trials;
  }

  bool operator==(const Heatmap&) const = default;
};

// Counts every visited state, repeats included. One trial per log.
inline Heatmap accumulate_heatmap(std::span<const TrajectoryLog> trajectories, const GridWorld& world) {
  Heatmap map(world.width(), world.height());
  for (const TrajectoryLog& log : trajectories) {
    for (const Cell& c : log.states) {
      if (!world.in_grid(c)) throw OutOfBounds("trajectory state " + to_string(c) + " outside the grid");
      ++map.at(c);
    }
    ++map.trials;
  }
  return map;
}

namespace detail {

// Unsigned angle in [0, pi] between two non-zero vectors.
inline double unsigned_angle(double ax, double ay, double bx, double by) {
  return std::atan2(std::abs(ax * by - ay * bx), ax * bx + ay * by);
}

}  // namespace detail

// Mean of (theta_decoy - theta_true) over executed steps, where each theta is
// the unsigned angle between the motion vector and the direction to that
// target. Negative means the motion leaned toward the decoy. Steps taken from
// the goal or decoy cell have no direction and are skipped.
inline double cal(std::span<const Cell> states, const Cell& goal, const Cell& decoy) {
  if (states.size() < 2) throw TooShort("CAL needs at least two states");
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 1; i < states.size(); ++i) {
    const Cell& prev = states[i - 1];
    const Cell& cur = states[i];
    if (prev == goal || prev == decoy || prev == cur) continue;
    const double mx = cur.x - prev.x;
    const double my = cur.y - prev.y;
    const double theta_true = detail::unsigned_angle(mx, my, goal.x - prev.x, goal.y - prev.y);
    const double theta_decoy = detail::unsigned_angle(mx, my, decoy.x - prev.x, decoy.y - prev.y);
    sum += theta_decoy - theta_true;
    ++n;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

inline double cal(const TrajectoryLog& log, const Cell& goal, const Cell& decoy) {
  return cal(log.states, goal, decoy);
}

struct CalReport {
  std::vector<double> per_trial;
  double mean = 0.0;
  double fraction_decoy_biased = 0.0;
};

inline CalReport cal_report(std::span<const TrajectoryLog> logs, const Cell& goal, const Cell& decoy) {
  CalReport r;
  std::size_t biased = 0;
  for (const auto& log : logs) {
    const double v = cal(log, goal, decoy);
    r.per_trial.push_back(v);
    r.mean += v;
    if (v < 0.0) ++biased;
  }
  if (!logs.empty()) {
    r.mean /= static_cast<double>(logs.size());
    r.fraction_decoy_biased = static_cast<double>(biased) / static_cast<double>(logs.size());
  }
  return r;
}

inline std::vector<double> ambiguity_trace(std::span<const Cell> states, const Cell& goal, const Cell& decoy) {
  std::vector<double> out;
  out.reserve(states.size());
  for (const Cell& s : states) out.push_back(std::abs(euclidean(s, decoy) - euclidean(s, goal)));
  return out;
}

inline std::vector<double> ambiguity_trace(const TrajectoryLog& log, const Cell& goal, const Cell& decoy) {
  return ambiguity_trace(log.states, goal, decoy);
}

// Side map relative to the centreline: +1 on or right of x_mid, -1 left of it.
inline int side_of(const Cell& c, double x_mid) { return static_cast<double>(c.x) >= x_mid ? +1 : -1; }

struct SideCounts {
  double false_side = 0.0;  // S_F
  double true_side = 0.0;   // S_T

  bool operator==(const SideCounts&) const = default;
};

inline SideCounts side_counts(std::span<const Cell> agents, std::span<const std::size_t> runners, double x_mid,
                              int sigma_false, int sigma_true) {
  SideCounts out;
  for (std::size_t i : runners) {
    const int side = side_of(agents[i], x_mid);
    out.false_side += 0.5 * (1.0 + side * sigma_false);
    out.true_side += 0.5 * (1.0 + side * sigma_true);
  }
  return out;
}

// joint_states[t][i] is agent i's cell at step t.
inline std::vector<SideCounts> split_counts(const std::vector<std::vector<Cell>>& joint_states,
                                            std::span<const std::size_t> runners, double x_mid, int sigma_false,
                                            int sigma_true) {
  std::vector<SideCounts> out;
  out.reserve(joint_states.size());
  for (const auto& step : joint_states) out.push_back(side_counts(step, runners, x_mid, sigma_false, sigma_true));
  return out;
}

// Euclidean distance from p to the segment [a, b].
inline double distance_to_segment(const Cell& p, const Cell& a, const Cell& b) {
  const double abx = b.x - a.x;
  const double aby = b.y - a.y;
  const double apx = p.x - a.x;
  const double apy = p.y - a.y;
  const double len2 = abx * abx + aby * aby;
  double t = len2 > 0.0 ? (apx * abx + apy * aby) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(apx - t * abx, apy - t * aby);
}

// Sum over visited states of the distance from the straight start-to-goal segment.
inline double deviation_area(std::span<const Cell> states, const Cell& start, const Cell& goal) {
  double sum = 0.0;
  for (const Cell& s : states) sum += distance_to_segment(s, start, goal);
  return sum;
}

// Net reduction of the decoy distance over the first `fraction` of executed steps.
inline double early_decoy_approach(std::span<const Cell> states, const Cell& decoy, double fraction) {
  if (states.size() < 2) return 0.0;
  const std::size_t steps = states.size() - 1;
  const auto k = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(steps)));
  return euclidean(states.front(), decoy) - euclidean(states[k], decoy);
}

inline double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace dpp
