#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dpp/cost.hpp"
#include "dpp/errors.hpp"
#include "dpp/horizon.hpp"
#include "dpp/moving_goal.hpp"
#include "dpp/policy.hpp"
#include "dpp/rng.hpp"
#include "dpp/world.hpp"

namespace dpp {

struct SingleAgentConfig {
  Cell start;
  GoalLayout layout;
  int K = 1;  // horizon
  int M = 1;  // actions executed per replan, 1 <= M <= K
  double lambda = 1.0;
  CostSpec cost;
  PrunePolicy prune;
  ObstacleMode obstacle_mode = ObstacleMode::Penalize;
  std::optional<int> max_steps;                   // default 10 * (width + height)
  std::optional<MovingGoalTrack> false_goal_track;  // drives false_goals[0] when set

  bool operator==(const SingleAgentConfig&) const = default;

  void validate() const {
    if (K < 1) throw InvalidArgument("K must be >= 1");
    if (M < 1 || M > K) throw InvalidArgument("M must satisfy 1 <= M <= K");
    if (!(lambda > 0.0)) throw InvalidArgument("lambda must be > 0");
    if (max_steps && *max_steps <= 0) throw InvalidArgument("max_steps must be > 0");
    if (cost.schedule) cost.schedule->schedule.validate();
    if (prune.mode == PrunePolicy::Mode::Beam && prune.beam_width < 1)
      throw InvalidArgument("beam_width must be >= 1");
    if (std::find(layout.false_goals.begin(), layout.false_goals.end(), layout.true_goal) !=
        layout.false_goals.end())
      throw InvalidArgument("true goal listed as a false goal");
  }

  int resolved_max_steps(const GridWorld& world) const {
    return max_steps.value_or(10 * (world.width() + world.height()));
  }

  // Goal layout in force at replan time t.
  GoalLayout layout_at(int t) const {
    GoalLayout out = layout;
    if (false_goal_track) {
      const Cell moving = goal_position(*false_goal_track, t);
      if (out.false_goals.empty())
        out.false_goals.push_back(moving);
      else
        out.false_goals.front() = moving;
    }
    return out;
  }

  CostContext cost_context() const { return {cost.form, cost.aggregation}; }
};

struct StepRecord {
  int t = 0;
  std::size_t chosen = 0;
  std::size_t candidates = 0;
  double u = 0.0;
  CostWeights weights;
  double cost = 0.0;
  std::vector<Cell> false_goals;

  bool operator==(const StepRecord&) const = default;
};

struct TrajectoryLog {
  std::vector<Cell> states;
  std::vector<StepRecord> per_step;
  bool reached_goal = false;

  std::size_t steps() const noexcept { return states.empty() ? 0 : states.size() - 1; }
  bool operator==(const TrajectoryLog&) const = default;
};

class StepCapExceeded : public Error {
 public:
  StepCapExceeded(const std::string& what, std::vector<TrajectoryLog> partial)
      : Error(what), partial_(std::move(partial)) {}
  const std::vector<TrajectoryLog>& partial() const noexcept { return partial_; }

 private:
  std::vector<TrajectoryLog> partial_;
};

struct ReplanResult {
  ActionSequence chosen;
  std::size_t index = 0;
  PolicyPMF pmf;
  CandidateSet candidates;
  std::vector<double> costs;
  CostWeights weights;
  GoalLayout layout;
  double u = 0.0;
};

inline PrefixScorer make_prefix_scorer(const CostWeights& weights, const GoalLayout& layout, int t,
                                       const GridWorld& world, CostContext ctx) {
  return [weights, layout, t, &world, ctx](const Cell& origin, std::span<const Action> prefix,
                                           std::span<const Cell> path) {
    return total_cost_single(weights, layout, t, origin, prefix, path, world, ctx);
  };
}

inline CandidateSet candidates_for(const SingleAgentConfig& cfg, const GridWorld& world, int t,
                                   const Cell& s, const CostWeights& weights, const GoalLayout& layout) {
  PrefixScorer scorer;
  if (cfg.prune.mode == PrunePolicy::Mode::Beam)
    scorer = make_prefix_scorer(weights, layout, t, world, cfg.cost_context());
  return generate_candidates(world, s, cfg.K, cfg.prune, cfg.obstacle_mode, scorer);
}

inline std::vector<double> candidate_costs(const SingleAgentConfig& cfg, const GridWorld& world, int t,
                                           const Cell& s, const CandidateSet& set,
                                           const CostWeights& weights, const GoalLayout& layout) {
  std::vector<double> costs;
  costs.reserve(set.size());
  for (const Candidate& c : set.items)
    costs.push_back(total_cost_single(weights, layout, t, s, c, world, cfg.cost_context()));
  return costs;
}

// One receding-horizon decision: candidates, costs, Boltzmann PMF, one draw.
inline ReplanResult replan_once(const SingleAgentConfig& cfg, const GridWorld& world, int t, const Cell& s,
                                Rng& rng) {
  ReplanResult r;
  r.u = cfg.cost.u(t);
  r.weights = cfg.cost.at(t);
  r.layout = cfg.layout_at(t);
  r.candidates = candidates_for(cfg, world, t, s, r.weights, r.layout);
  r.costs = candidate_costs(cfg, world, t, s, r.candidates, r.weights, r.layout);
  r.pmf = build_pmf(r.costs, cfg.lambda);
  r.index = sample(r.pmf, rng);
  r.chosen = r.candidates[r.index].actions;
  return r;
}

inline TrajectoryLog plan_episode(const SingleAgentConfig& cfg, const GridWorld& world, Rng& rng) {
  cfg.validate();
  if (!world.in_bounds(cfg.start)) throw OutOfBounds("start " + to_string(cfg.start) + " outside the grid");

  TrajectoryLog log;
  log.states.push_back(cfg.start);
  const Cell goal = cfg.layout.true_goal;
  const int cap = cfg.resolved_max_steps(world);

  Cell s = cfg.start;
  int t = 0;
  while (s != goal) {
    if (t >= cap)
      throw StepCapExceeded("episode exceeded " + std::to_string(cap) + " steps", {std::move(log)});
    ReplanResult r = replan_once(cfg, world, t, s, rng);
    log.per_step.push_back(
        {t, r.index, r.candidates.size(), r.u, r.weights, r.costs[r.index], r.layout.false_goals});
    for (int m = 0; m < cfg.M; ++m) {
      s = apply(world, s, r.chosen[static_cast<std::size_t>(m)]);
      log.states.push_back(s);
      ++t;
      if (s == goal || t >= cap) break;
    }
  }
  log.reached_goal = true;
  return log;
}

}  // namespace dpp
