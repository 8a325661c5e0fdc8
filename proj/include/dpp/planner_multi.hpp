#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dpp/cost.hpp"
#include "dpp/errors.hpp"
#include "dpp/horizon.hpp"
#include "dpp/metrics.hpp"
#include "dpp/planner_single.hpp"
#include "dpp/policy.hpp"
#include "dpp/rng.hpp"
#include "dpp/world.hpp"

namespace dpp {

enum class TeamMode {
  Separable,        // independent per-agent Boltzmann draws
  JointExhaustive,  // one draw over the Cartesian product of candidate sets
};

enum class CouplingKind { EnergyPenalty, VolleyballSplit, SpatialRepulsion, Custom };

struct CouplingParams {
  // EnergyPenalty: alpha * sum of per-member energy increments, charged as a cost.
  double alpha = 0.0;
  std::vector<double> rates;  // e_i, member order

  // VolleyballSplit: gamma_F (S_F - target_F)^2 + gamma_T (S_T - target_T)^2.
  double gamma_false = 12.0;
  double gamma_true = 12.0;
  double target_false = 3.0;
  double target_true = 1.0;
  double x_mid = 0.0;
  int sigma_false = +1;
  int sigma_true = -1;
  bool with_repulsion = false;  // appends the repulsion term as a second column

  // SpatialRepulsion: sum over member pairs of gamma_sep / (epsilon + d).
  double gamma_sep = 0.5;
  double epsilon = 0.1;

  // Custom: handler looked up by name in a CouplingRegistry.
  std::string custom_name;
  std::size_t custom_terms = 1;

  bool operator==(const CouplingParams&) const = default;
};

struct CouplingSpec {
  std::vector<std::size_t> members;
  CouplingKind kind = CouplingKind::EnergyPenalty;
  CouplingParams params;

  bool operator==(const CouplingSpec&) const = default;

  // L_S, the number of interaction cost terms this subset contributes.
  std::size_t terms() const {
    if (kind == CouplingKind::VolleyballSplit && params.with_repulsion) return 2;
    if (kind == CouplingKind::Custom) return params.custom_terms;
    return 1;
  }
};

// Per-member data the interaction operator may read, aligned with members.
struct InteractionContext {
  std::span<const Cell> goals;
  std::span<const int> steps;  // executed moves behind each next state (0 = holding)
};

using CustomCoupling = std::function<std::vector<double>(
    const CouplingSpec&, std::span<const Cell> now, std::span<const Cell> next, const InteractionContext&)>;

class CouplingRegistry {
 public:
  void add(std::string name, CustomCoupling fn) { handlers_[std::move(name)] = std::move(fn); }
  const CustomCoupling* find(const std::string& name) const {
    auto it = handlers_.find(name);
    return it == handlers_.end() ? nullptr : &it->second;
  }

 private:
  std::map<std::string, CustomCoupling> handlers_;
};

// Energy increment max{0, e + dD}, where dD is the change of the energy needed
// to reach the goal, e * (manhattan(next, G) - manhattan(now, G)). A geodesic
// step costs nothing; each step away from the goal costs 2e.
inline double energy_increment(double rate, const Cell& now, const Cell& next, const Cell& goal, int steps = 1) {
  const double delta_to_go = rate * static_cast<double>(manhattan(next, goal) - manhattan(now, goal));
  return std::max(0.0, rate * static_cast<double>(steps) + delta_to_go);
}

inline double repulsion(std::span<const Cell> states, double gamma_sep, double epsilon) {
  double sum = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i)
    for (std::size_t j = i + 1; j < states.size(); ++j) sum += gamma_sep / (epsilon + euclidean(states[i], states[j]));
  return sum;
}

inline double split_penalty(const SideCounts& counts, const CouplingParams& p) {
  const double df = counts.false_side - p.target_false;
  const double dt = counts.true_side - p.target_true;
  return p.gamma_false * df * df + p.gamma_true * dt * dt;
}

inline std::vector<double> interaction_cost(const CouplingSpec& spec, std::span<const Cell> now,
                                            std::span<const Cell> next, const InteractionContext& ctx = {},
                                            const CouplingRegistry* registry = nullptr) {
  if (now.size() != spec.members.size() || next.size() != spec.members.size())
    throw DimensionMismatch("interaction states do not match coupling members");
  const CouplingParams& p = spec.params;
  switch (spec.kind) {
    case CouplingKind::EnergyPenalty: {
      if (p.rates.size() != spec.members.size() || ctx.goals.size() != spec.members.size())
        throw DimensionMismatch("energy coupling needs a rate and goal per member");
      double total = 0.0;
      for (std::size_t k = 0; k < now.size(); ++k) {
        const int steps = ctx.steps.empty() ? (now[k] == next[k] ? 0 : 1) : ctx.steps[k];
        total += energy_increment(p.rates[k], now[k], next[k], ctx.goals[k], steps);
      }
      return {p.alpha * total};
    }
    case CouplingKind::VolleyballSplit: {
      std::vector<std::size_t> all(next.size());
      std::iota(all.begin(), all.end(), std::size_t{0});
      const SideCounts counts = side_counts(next, all, p.x_mid, p.sigma_false, p.sigma_true);
      if (p.with_repulsion) return {split_penalty(counts, p), repulsion(next, p.gamma_sep, p.epsilon)};
      return {split_penalty(counts, p)};
    }
    case CouplingKind::SpatialRepulsion:
      return {repulsion(next, p.gamma_sep, p.epsilon)};
    case CouplingKind::Custom: {
      const CustomCoupling* fn = registry ? registry->find(p.custom_name) : nullptr;
      if (!fn) throw UnknownKind("no handler registered for coupling '" + p.custom_name + "'");
      std::vector<double> out = (*fn)(spec, now, next, ctx);
      if (out.size() != spec.terms()) throw DimensionMismatch("custom coupling returned the wrong term count");
      return out;
    }
  }
  throw UnknownKind("unhandled coupling kind");
}

struct TeamBudget {
  double total = 0.0;          // B_team
  double gamma = 0.0;          // slack fraction
  std::vector<double> rates;   // e_i per agent

  double d_max() const { return gamma * total; }
  bool operator==(const TeamBudget&) const = default;
};

struct BudgetState {
  double consumed = 0.0;        // sum of b_i over executed steps
  double deviation_used = 0.0;  // D_used, sum of energy increments over executed steps

  bool operator==(const BudgetState&) const = default;
};

enum class TeamObjective {
  PerAgent,           // each agent's own CostSpec
  BudgetDeception,    // -kappa_i * progress drop - beta_i(f) * false-goal drop
  ReferenceTracking,  // distance to a dynamically assigned reference cell
};

struct BudgetDeceptionParams {
  std::vector<double> kappa;  // per agent
  TriangularRamp ramp;        // w_F(f), f = D_used / D_max
  double rate_exponent = 1.0;  // beta_i = e_i^p * w_F(f)

  bool operator==(const BudgetDeceptionParams&) const = default;
};

// Setter tracks a fixed cell; runners are matched to slots every replan.
struct ReferenceRoles {
  std::size_t setter = 0;
  Cell setter_reference;
  std::vector<std::size_t> runners;
  std::vector<Cell> runner_slots;

  bool operator==(const ReferenceRoles&) const = default;
};

struct TeamConfig {
  std::vector<SingleAgentConfig> agents;
  std::vector<CouplingSpec> couplings;
  RationalityVector lambda_vec;  // per-agent entries, then one per coupling term
  TeamMode mode = TeamMode::JointExhaustive;
  std::optional<TeamBudget> budget;
  TeamObjective objective = TeamObjective::PerAgent;
  std::optional<BudgetDeceptionParams> budget_deception;
  std::optional<ReferenceRoles> roles;
  std::optional<int> fixed_duration;  // run exactly this many steps; agents never finish
  std::optional<int> max_steps;
  std::size_t joint_cap = 1'000'000;

  bool operator==(const TeamConfig&) const = default;

  std::size_t coupling_terms() const {
    std::size_t n = 0;
    for (const auto& c : couplings) n += c.terms();
    return n;
  }
  std::size_t cost_width() const { return agents.size() + coupling_terms(); }

  void validate() const {
    if (agents.empty()) throw InvalidArgument("team needs at least one agent");
    for (const auto& a : agents) a.validate();
    if (lambda_vec.size() != cost_width())
      throw DimensionMismatch("lambda vector has " + std::to_string(lambda_vec.size()) + " entries, cost vector " +
                              std::to_string(cost_width()));
    lambda_vec.validate();
    std::set<std::size_t> seen;
    for (const auto& c : couplings) {
      if (c.members.size() < 2) throw InvalidArgument("coupled subsets need at least two members");
      for (std::size_t m : c.members) {
        if (m >= agents.size()) throw InvalidArgument("coupling member out of range");
        if (!seen.insert(m).second) throw InvalidArgument("agent appears in more than one coupled subset");
      }
    }
    if (mode == TeamMode::Separable && (!couplings.empty() || budget))
      throw InvalidArgument("separable mode requires no couplings and no budget");
    if (budget) {
      if (!(budget->total > 0.0)) throw InvalidArgument("team budget must be > 0");
      if (budget->gamma < 0.0 || budget->gamma > 1.0) throw InvalidArgument("slack fraction outside [0,1]");
      if (budget->rates.size() != agents.size()) throw DimensionMismatch("one rate per agent required");
    }
    if (objective == TeamObjective::BudgetDeception) {
      if (!budget || !budget_deception) throw InvalidArgument("budget deception needs a budget and ramp");
      if (budget_deception->kappa.size() != agents.size()) throw DimensionMismatch("one kappa per agent required");
    }
    if (objective == TeamObjective::ReferenceTracking) {
      if (!roles) throw InvalidArgument("reference tracking needs roles");
      if (roles->runners.size() != roles->runner_slots.size())
        throw DimensionMismatch("one slot per runner required");
    }
    if (fixed_duration && *fixed_duration < 0) throw InvalidArgument("fixed duration must be >= 0");
  }

  int resolved_max_steps(const GridWorld& world) const {
    return max_steps.value_or(10 * (world.width() + world.height()));
  }
};

struct JointCandidate {
  std::vector<std::uint32_t> choice;  // candidate index per active agent
  std::vector<double> cost_vector;
};

struct JointSet {
  std::vector<std::size_t> agents;  // active agent indices, aligned with choice
  std::vector<JointCandidate> items;

  std::size_t size() const noexcept { return items.size(); }
};

inline std::size_t joint_count(std::span<const CandidateSet> sets, std::size_t cap) {
  std::size_t product = 1;
  for (const auto& s : sets) {
    if (s.empty()) throw EmptyCandidateSet("an agent has no candidates");
    if (product > cap / s.size() + 1) return cap + 1;
    product *= s.size();
    if (product > cap) return cap + 1;
  }
  return product;
}

// Full Cartesian product; the first agent varies slowest.
inline JointSet enumerate_joint(std::span<const CandidateSet> sets, std::span<const std::size_t> agents,
                                std::size_t cap = 1'000'000) {
  if (sets.size() != agents.size()) throw DimensionMismatch("one candidate set per active agent required");
  const std::size_t total = joint_count(sets, cap);
  if (total > cap)
    throw SizeLimitExceeded("joint candidate count exceeds the cap of " + std::to_string(cap));

  JointSet out;
  out.agents.assign(agents.begin(), agents.end());
  out.items.reserve(total);
  std::vector<std::uint32_t> odometer(sets.size(), 0);
  for (std::size_t n = 0; n < total; ++n) {
    out.items.push_back({odometer, {}});
    for (std::size_t k = sets.size(); k-- > 0;) {
      if (++odometer[k] < sets[k].size()) break;
      odometer[k] = 0;
    }
  }
  return out;
}

inline JointSet enumerate_joint(std::span<const CandidateSet> sets, std::size_t cap = 1'000'000) {
  std::vector<std::size_t> agents(sets.size());
  std::iota(agents.begin(), agents.end(), std::size_t{0});
  return enumerate_joint(sets, agents, cap);
}

// Exact minimum-total-distance matching of runners to slots; ties go to the
// lexicographically first permutation.
inline std::vector<Cell> assign_references(std::span<const Cell> runners, std::span<const Cell> slots) {
  if (runners.size() != slots.size()) throw DimensionMismatch("one slot per runner required");
  std::vector<std::size_t> perm(slots.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::vector<std::size_t> best = perm;
  double best_total = kInfinity;
  do {
    double total = 0.0;
    for (std::size_t r = 0; r < runners.size(); ++r) total += euclidean(runners[r], slots[perm[r]]);
    if (total < best_total - 1e-12) {
      best_total = total;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  std::vector<Cell> out;
  out.reserve(runners.size());
  for (std::size_t r = 0; r < runners.size(); ++r) out.push_back(slots[best[r]]);
  return out;
}

// Everything assemble_cost_matrix and budget_prune need about the current replan.
struct ReplanContext {
  int t = 0;
  std::vector<Cell> positions;              // every agent
  std::vector<Cell> goals;                  // every agent
  std::vector<bool> finished;               // every agent
  std::vector<CandidateSet> sets;           // active agents only, aligned with JointSet::agents
  std::vector<std::vector<double>> local;   // per active agent, per candidate
  std::vector<int> execute;                 // moves each active agent executes from its sequence
};

namespace detail {

inline std::size_t active_slot(const JointSet& joints, std::size_t agent) {
  auto it = std::find(joints.agents.begin(), joints.agents.end(), agent);
  return it == joints.agents.end() ? joints.agents.size() : static_cast<std::size_t>(it - joints.agents.begin());
}

// Cells visited by the executed prefix, cut at goal arrival.
inline int executed_moves(const Candidate& c, int limit, const Cell& goal) {
  const int n = std::min<int>(limit, static_cast<int>(c.path.size()));
  for (int m = 0; m < n; ++m)
    if (c.path[static_cast<std::size_t>(m)] == goal) return m + 1;
  return n;
}

}  // namespace detail

inline CostMatrix assemble_cost_matrix(const TeamConfig& team, JointSet& joints, const ReplanContext& ctx,
                                       const CouplingRegistry* registry = nullptr) {
  const std::size_t width = team.cost_width();
  const std::size_t n_agents = team.agents.size();
  if (ctx.sets.size() != joints.agents.size() || ctx.local.size() != joints.agents.size())
    throw DimensionMismatch("replan context does not match the joint set");

  std::vector<std::size_t> slot_of(n_agents, joints.agents.size());
  for (std::size_t i = 0; i < n_agents; ++i) slot_of[i] = detail::active_slot(joints, i);

  CostMatrix matrix(joints.size(), width);
  std::vector<Cell> now;
  std::vector<Cell> next;
  std::vector<Cell> goals;
  std::vector<int> steps;
  for (std::size_t r = 0; r < joints.size(); ++r) {
    JointCandidate& joint = joints.items[r];
    if (joint.choice.size() != joints.agents.size()) throw DimensionMismatch("joint choice has the wrong arity");
    auto row = matrix.row(r);
    for (std::size_t k = 0; k < joints.agents.size(); ++k) row[joints.agents[k]] = ctx.local[k][joint.choice[k]];

    std::size_t column = n_agents;
    for (const CouplingSpec& coupling : team.couplings) {
      now.clear();
      next.clear();
      goals.clear();
      steps.clear();
      for (std::size_t m : coupling.members) {
        now.push_back(ctx.positions[m]);
        goals.push_back(ctx.goals[m]);
        const std::size_t k = slot_of[m];
        if (k < joints.agents.size()) {
          const Candidate& c = ctx.sets[k][joint.choice[k]];
          next.push_back(c.terminal);
          steps.push_back(static_cast<int>(c.path.size()));
        } else {
          next.push_back(ctx.positions[m]);
          steps.push_back(0);
        }
      }
      const std::vector<double> phi =
          interaction_cost(coupling, now, next, InteractionContext{goals, steps}, registry);
      for (double v : phi) row[column++] = v;
    }
    joint.cost_vector.assign(row.begin(), row.end());
  }
  return matrix;
}

// Drops joints whose executed prefix would push D_used past D_max or leave
// too little budget for every agent to walk its geodesic to the goal.
inline JointSet budget_prune(const JointSet& joints, const TeamBudget& budget, const BudgetState& used,
                             const ReplanContext& ctx) {
  constexpr double kSlack = 1e-9;
  const double d_max = budget.d_max();
  if (used.deviation_used > d_max + kSlack) throw InvalidArgument("deviation already exceeds D_max");

  JointSet out;
  out.agents = joints.agents;
  for (const JointCandidate& joint : joints.items) {
    double deviation = 0.0;
    double drain = 0.0;
    double reserve = 0.0;
    std::vector<bool> counted(ctx.positions.size(), false);
    for (std::size_t k = 0; k < joints.agents.size(); ++k) {
      const std::size_t i = joints.agents[k];
      const Candidate& c = ctx.sets[k][joint.choice[k]];
      const int moves = detail::executed_moves(c, ctx.execute[k], ctx.goals[i]);
      Cell prev = ctx.positions[i];
      for (int m = 0; m < moves; ++m) {
        const Cell& cur = c.path[static_cast<std::size_t>(m)];
        deviation += energy_increment(budget.rates[i], prev, cur, ctx.goals[i]);
        prev = cur;
      }
      drain += budget.rates[i] * moves;
      reserve += budget.rates[i] * manhattan(prev, ctx.goals[i]);
      counted[i] = true;
    }
    for (std::size_t i = 0; i < ctx.positions.size(); ++i)
      if (!counted[i]) reserve += budget.rates[i] * manhattan(ctx.positions[i], ctx.goals[i]);

    const bool within_slack = used.deviation_used + deviation <= d_max + kSlack;
    const bool reachable = used.consumed + drain + reserve <= budget.total + kSlack;
    if (within_slack && reachable) out.items.push_back(joint);
  }
  if (out.items.empty())
    throw NoFeasibleJoint("no joint action keeps the team within budget (D_used=" +
                          std::to_string(used.deviation_used) + ", consumed=" + std::to_string(used.consumed) + ")");
  return out;
}

struct TeamStepRecord {
  int t = 0;
  std::size_t joint_index = 0;
  std::size_t joint_count = 0;
  double fraction = 0.0;  // D_used / D_max at the replan
  double w_false = 0.0;   // active ramp intensity
  BudgetState budget;

  bool operator==(const TeamStepRecord&) const = default;
};

struct TeamOutcome {
  std::vector<TrajectoryLog> logs;
  std::vector<TeamStepRecord> replans;
  std::vector<BudgetState> meters;  // after every executed global step

  bool operator==(const TeamOutcome&) const = default;
};

class TeamPlanner {
 public:
  TeamPlanner(const TeamConfig& team, const GridWorld& world, const CouplingRegistry* registry = nullptr)
      : team_(team), world_(world), registry_(registry) {
    team_.validate();
  }

  TeamOutcome run(Rng& rng) const {
    const std::size_t n = team_.agents.size();
    TeamOutcome out;
    out.logs.resize(n);

    std::vector<Cell> pos(n);
    std::vector<Cell> goals(n);
    std::vector<bool> finished(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& a = team_.agents[i];
      if (!world_.in_bounds(a.start)) throw OutOfBounds("agent start " + to_string(a.start) + " outside the grid");
      pos[i] = a.start;
      goals[i] = a.layout.true_goal;
      finished[i] = !team_.fixed_duration && pos[i] == goals[i];
      out.logs[i].states.push_back(pos[i]);
    }

    BudgetState meter;
    const int cap = team_.resolved_max_steps(world_);
    int t = 0;
    for (;;) {
      if (team_.fixed_duration) {
        if (t >= *team_.fixed_duration) break;
      } else if (std::all_of(finished.begin(), finished.end(), [](bool f) { return f; })) {
        break;
      }
      if (t >= cap) throw StepCapExceeded("team episode exceeded " + std::to_string(cap) + " steps", out.logs);

      ReplanContext ctx;
      ctx.t = t;
      ctx.positions = pos;
      ctx.goals = goals;
      ctx.finished = finished;
      std::vector<std::size_t> active;
      for (std::size_t i = 0; i < n; ++i)
        if (!finished[i]) active.push_back(i);

      TeamStepRecord record;
      record.t = t;
      record.budget = meter;
      if (team_.budget && team_.budget->d_max() > 0.0)
        record.fraction = std::clamp(meter.deviation_used / team_.budget->d_max(), 0.0, 1.0);
      if (team_.budget_deception) record.w_false = triangular_ramp(team_.budget_deception->ramp, record.fraction);

      const std::vector<Cell> references = current_references(pos);
      for (std::size_t i : active) {
        const auto& cfg = team_.agents[i];
        const GoalLayout layout = cfg.layout_at(t);
        const CostWeights weights = cfg.cost.at(t);
        CandidateSet set = candidates_for(cfg, world_, t, pos[i], weights, layout);
        ctx.local.push_back(local_costs(i, t, pos[i], set, layout, weights, record.w_false, references));
        ctx.sets.push_back(std::move(set));
        ctx.execute.push_back(cfg.M);
      }

      std::vector<std::size_t> chosen(active.size(), 0);
      if (team_.mode == TeamMode::Separable) {
        for (std::size_t k = 0; k < active.size(); ++k) {
          const PolicyPMF pmf = build_pmf(ctx.local[k], team_.lambda_vec[active[k]]);
          chosen[k] = sample(pmf, rng);
        }
        record.joint_count = 1;
        for (const auto& s : ctx.sets) record.joint_count *= s.size();
      } else {
        JointSet joints = enumerate_joint(ctx.sets, active, team_.joint_cap);
        if (team_.budget) joints = budget_prune(joints, *team_.budget, meter, ctx);
        const CostMatrix matrix = assemble_cost_matrix(team_, joints, ctx, registry_);
        const PolicyPMF pmf = build_joint_pmf(matrix, team_.lambda_vec);
        const std::size_t j = sample(pmf, rng);
        record.joint_index = j;
        record.joint_count = joints.size();
        for (std::size_t k = 0; k < active.size(); ++k) chosen[k] = joints.items[j].choice[k];
      }
      out.replans.push_back(record);

      for (std::size_t k = 0; k < active.size(); ++k) {
        const std::size_t i = active[k];
        const auto& cfg = team_.agents[i];
        out.logs[i].per_step.push_back({t, chosen[k], ctx.sets[k].size(), cfg.cost.u(t), cfg.cost.at(t),
                                        ctx.local[k][chosen[k]], cfg.layout_at(t).false_goals});
      }

      int m_max = 0;
      for (std::size_t k = 0; k < active.size(); ++k) m_max = std::max(m_max, ctx.execute[k]);
      for (int mu = 1; mu <= m_max; ++mu) {
        for (std::size_t i = 0; i < n; ++i) {
          const std::size_t k = detail::active_slot(JointSet{active, {}}, i);
          const bool moves = k < active.size() && !finished[i] && mu <= ctx.execute[k];
          if (moves) {
            const Action a = ctx.sets[k][chosen[k]].actions[static_cast<std::size_t>(mu - 1)];
            const Cell next = apply(world_, pos[i], a);
            if (team_.budget) {
              meter.consumed += team_.budget->rates[i];
              meter.deviation_used += energy_increment(team_.budget->rates[i], pos[i], next, goals[i]);
            }
            pos[i] = next;
            if (!team_.fixed_duration && pos[i] == goals[i]) finished[i] = true;
          }
          out.logs[i].states.push_back(pos[i]);
        }
        ++t;
        out.meters.push_back(meter);
        if (team_.fixed_duration && t >= *team_.fixed_duration) break;
      }
    }
    for (std::size_t i = 0; i < n; ++i) out.logs[i].reached_goal = pos[i] == goals[i];
    return out;
  }

 private:
  std::vector<Cell> current_references(const std::vector<Cell>& pos) const {
    std::vector<Cell> refs(pos.size());
    if (team_.objective != TeamObjective::ReferenceTracking) return refs;
    const ReferenceRoles& roles = *team_.roles;
    std::vector<Cell> runner_pos;
    for (std::size_t r : roles.runners) runner_pos.push_back(pos[r]);
    const std::vector<Cell> assigned = assign_references(runner_pos, roles.runner_slots);
    for (std::size_t k = 0; k < roles.runners.size(); ++k) refs[roles.runners[k]] = assigned[k];
    refs[roles.setter] = roles.setter_reference;
    return refs;
  }

  std::vector<double> local_costs(std::size_t i, int t, const Cell& s, const CandidateSet& set,
                                  const GoalLayout& layout, const CostWeights& weights, double w_false,
                                  const std::vector<Cell>& references) const {
    const auto& cfg = team_.agents[i];
    std::vector<double> costs;
    costs.reserve(set.size());
    const bool sum = cfg.cost.aggregation == PathAggregation::SumOverPath;
    switch (team_.objective) {
      case TeamObjective::PerAgent:
        return candidate_costs(cfg, world_, t, s, set, weights, layout);
      case TeamObjective::BudgetDeception: {
        const double kappa = team_.budget_deception->kappa[i];
        const double beta = std::pow(team_.budget->rates[i], team_.budget_deception->rate_exponent) * w_false;
        const Cell G = layout.true_goal;
        for (const Candidate& c : set.items) {
          if (path_hits_obstacle(world_, c.path)) {
            costs.push_back(kInfinity);
            continue;
          }
          double total = 0.0;
          Cell prev = s;
          const auto visit = [&](const Cell& cur) {
            total -= kappa * progress_drop(euclidean(prev, G), euclidean(cur, G));
            for (const Cell& F : layout.false_goals)
              total -= beta * progress_drop(euclidean(prev, F), euclidean(cur, F));
          };
          if (sum) {
            for (const Cell& cur : c.path) {
              visit(cur);
              prev = cur;
            }
          } else {
            visit(c.terminal);
          }
          costs.push_back(total);
        }
        return costs;
      }
      case TeamObjective::ReferenceTracking: {
        const Cell ref = references[i];
        for (const Candidate& c : set.items) {
          if (path_hits_obstacle(world_, c.path)) {
            costs.push_back(kInfinity);
            continue;
          }
          double total = 0.0;
          if (sum)
            for (const Cell& cur : c.path) total += euclidean(cur, ref);
          else
            total = euclidean(c.terminal, ref);
          costs.push_back(total);
        }
        return costs;
      }
    }
    return costs;
  }

  TeamConfig team_;
  const GridWorld& world_;
  const CouplingRegistry* registry_;
};

inline TeamOutcome plan_team(const TeamConfig& team, const GridWorld& world, Rng& rng,
                             const CouplingRegistry* registry = nullptr) {
  return TeamPlanner(team, world, registry).run(rng);
}

}  // namespace dpp
