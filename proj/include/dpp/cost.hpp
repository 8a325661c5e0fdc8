#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dpp/errors.hpp"
#include "dpp/horizon.hpp"
#include "dpp/world.hpp"

namespace dpp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Active term weights at one replan. The use_* flags are the binary
// switches for the optional time and smoothness penalties.
struct CostWeights {
  double goal = 1.0;
  double deception = 0.0;
  double time = 0.0;
  double smooth = 0.0;
  bool use_time = false;
  bool use_smooth = false;

  bool operator==(const CostWeights&) const = default;
};

struct PiecewiseSchedule {
  int start = 0;      // S
  int length = 1;     // L
  int ramp_up = 0;    // r_up
  int ramp_down = 0;  // r_down

  bool operator==(const PiecewiseSchedule&) const = default;

  void validate() const {
    if (start < 0) throw InvalidArgument("schedule start must be >= 0");
    if (length <= 0) throw InvalidArgument("schedule length must be > 0");
    if (ramp_up < 0 || ramp_down < 0) throw InvalidArgument("ramp durations must be >= 0");
    if (ramp_up + ramp_down > length) throw InvalidArgument("ramps exceed the schedule window");
  }
};

struct TriangularRamp {
  double w_min = 0.0;
  double w_max = 0.0;

  bool operator==(const TriangularRamp&) const = default;
};

struct GoalLayout {
  Cell true_goal;
  std::vector<Cell> false_goals;
  std::vector<double> false_goal_weights;  // empty means 1.0 for every false goal
  std::optional<int> time_budget;

  bool operator==(const GoalLayout&) const = default;

  double false_goal_weight(std::size_t z) const {
    return z < false_goal_weights.size() ? false_goal_weights[z] : 1.0;
  }
};

inline double progress_drop(double d_before, double d_after) {
  return std::max(0.0, d_before - d_after);
}

inline double c_goal(const Cell& goal, const Cell& s, const Cell& s_next) {
  return -progress_drop(euclidean(s, goal), euclidean(s_next, goal));
}

inline double c_decep(const Cell& false_goal, const Cell& s, const Cell& s_next) {
  return -progress_drop(euclidean(s, false_goal), euclidean(s_next, false_goal));
}

inline double c_amb(const Cell& goal, const Cell& false_goal, const Cell& s_next) {
  return std::abs(euclidean(s_next, false_goal) - euclidean(s_next, goal));
}

// Overrun of the projected arrival time past the time budget.
inline double c_time(int t, int K, int budget, const Cell& goal, const Cell& s_hat) {
  if (budget <= 0) throw InvalidArgument("time budget must be > 0");
  const double arrival = static_cast<double>(t + K) + std::ceil(euclidean(s_hat, goal));
  return std::max(0.0, arrival - static_cast<double>(budget));
}

// Number of heading changes.
inline double c_smooth(std::span<const Action> seq) {
  double changes = 0.0;
  for (std::size_t m = 1; m < seq.size(); ++m) changes += (seq[m] != seq[m - 1]) ? 1.0 : 0.0;
  return changes;
}

inline double schedule_u(const PiecewiseSchedule& sched, int t) {
  const int S = sched.start;
  const int L = sched.length;
  if (t < S) return 0.0;
  if (sched.ramp_up > 0 && t < S + sched.ramp_up)
    return static_cast<double>(t - S) / static_cast<double>(sched.ramp_up);
  if (t < S + L - sched.ramp_down) return 1.0;
  if (sched.ramp_down > 0 && t < S + L)
    return static_cast<double>(S + L - t) / static_cast<double>(sched.ramp_down);
  return 0.0;
}

// (goal weight, deception weight) = (kappa0 (1 - u), alpha0 u).
inline std::pair<double, double> exaggeration_weights(double u, double kappa0, double alpha0) {
  return {kappa0 * (1.0 - u), alpha0 * u};
}

inline double triangular_ramp(const TriangularRamp& ramp, double f) {
  if (!(f >= 0.0 && f <= 1.0)) throw OutOfRange("ramp fraction outside [0,1]");
  return ramp.w_min + (ramp.w_max - ramp.w_min) * std::max(0.0, 1.0 - std::abs(2.0 * f - 1.0));
}

enum class DeceptionForm {
  Exaggeration,  // deception weight multiplies the false-goal approach term
  Ambiguity,     // deception weight multiplies |d(s,F) - d(s,G)|
};

enum class PathAggregation {
  SumOverPath,   // per-step terms summed along the rollout path
  TerminalOnly,  // terms evaluated between the origin and the predicted terminal
};

struct ScheduledGains {
  PiecewiseSchedule schedule;
  double kappa = 1.0;  // goal gain
  double alpha = 1.0;  // deception gain

  bool operator==(const ScheduledGains&) const = default;
};

// Cost composition plus an optional time schedule for the goal/deception pair.
struct CostSpec {
  DeceptionForm form = DeceptionForm::Exaggeration;
  PathAggregation aggregation = PathAggregation::SumOverPath;
  CostWeights weights;
  std::optional<ScheduledGains> schedule;

  bool operator==(const CostSpec&) const = default;

  double u(int t) const { return schedule ? schedule_u(schedule->schedule, t) : 0.0; }

  CostWeights at(int t) const {
    CostWeights w = weights;
    if (schedule) {
      const auto [goal, deception] = exaggeration_weights(u(t), schedule->kappa, schedule->alpha);
      w.goal = goal;
      w.deception = deception;
    }
    return w;
  }
};

struct CostContext {
  DeceptionForm form = DeceptionForm::Exaggeration;
  PathAggregation aggregation = PathAggregation::SumOverPath;
};

inline bool path_hits_obstacle(const GridWorld& world, std::span<const Cell> path) {
  if (world.obstacles().empty()) return false;
  return std::any_of(path.begin(), path.end(), [&](const Cell& c) { return world.is_obstacle(c); });
}

// Weighted sum of the goal, deception, time and smoothness terms for one
// candidate. +infinity when the path enters an obstacle.
inline double total_cost_single(const CostWeights& w, const GoalLayout& layout, int t, const Cell& s,
                                std::span<const Action> seq, std::span<const Cell> path,
                                const GridWorld& world, CostContext ctx = {}) {
  if (path.empty() || path.size() != seq.size())
    throw DimensionMismatch("path and action sequence lengths differ");
  if (path_hits_obstacle(world, path)) return kInfinity;

  const Cell& s_hat = path.back();
  const Cell& G = layout.true_goal;
  const bool sum = ctx.aggregation == PathAggregation::SumOverPath;

  double goal_term = 0.0;
  if (w.goal != 0.0) {
    if (sum) {
      Cell prev = s;
      for (const Cell& c : path) {
        goal_term += c_goal(G, prev, c);
        prev = c;
      }
    } else {
      goal_term = c_goal(G, s, s_hat);
    }
  }

  double deception_term = 0.0;
  if (w.deception != 0.0) {
    for (std::size_t z = 0; z < layout.false_goals.size(); ++z) {
      const Cell& F = layout.false_goals[z];
      double term = 0.0;
      if (ctx.form == DeceptionForm::Exaggeration) {
        if (sum) {
          Cell prev = s;
          for (const Cell& c : path) {
            term += c_decep(F, prev, c);
            prev = c;
          }
        } else {
          term = c_decep(F, s, s_hat);
        }
      } else if (sum) {
        for (const Cell& c : path) term += c_amb(G, F, c);
      } else {
        term = c_amb(G, F, s_hat);
      }
      deception_term += layout.false_goal_weight(z) * term;
    }
  }

  double total = w.goal * goal_term + w.deception * deception_term;
  if (w.use_time && layout.time_budget)
    total += w.time * c_time(t, static_cast<int>(seq.size()), *layout.time_budget, G, s_hat);
  if (w.use_smooth) total += w.smooth * c_smooth(seq);
  return total;
}

inline double total_cost_single(const CostWeights& w, const GoalLayout& layout, int t, const Cell& s,
                                const Candidate& candidate, const GridWorld& world,
                                CostContext ctx = {}) {
  return total_cost_single(w, layout, t, s, candidate.actions, candidate.path, world, ctx);
}

}  // namespace dpp
