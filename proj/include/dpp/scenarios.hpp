#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dpp/cost.hpp"
#include "dpp/errors.hpp"
#include "dpp/moving_goal.hpp"
#include "dpp/planner_multi.hpp"
#include "dpp/planner_single.hpp"
#include "dpp/world.hpp"

namespace dpp {

enum class PresetKind {
  ExaggerationHardSwitch,
  ExaggerationRampUp,
  ExaggerationRampDown,
  AmbiguityHardSwitch,
  AmbiguityRampUp,
  AmbiguityRampDown,
  ObstacleExaggeration,
  MovingFalseGoal,
  BudgetTeam,
  Volleyball,
};

struct ScenarioPreset {
  PresetKind kind = PresetKind::ExaggerationHardSwitch;
  double speed = 2.0;     // MovingFalseGoal
  char budget_case = 'a';  // BudgetTeam: a..d
  bool side_up = true;     // Volleyball
  int scale = 1;

  bool operator==(const ScenarioPreset&) const = default;
};

struct PresetInfo {
  std::string_view name;
  ScenarioPreset preset;
  std::string_view summary;
};

inline constexpr double kSlowFalseGoalSpeed = 0.4;
inline constexpr double kFastFalseGoalSpeed = 2.0;

inline const std::vector<PresetInfo>& preset_catalog() {
  static const std::vector<PresetInfo> catalog = {
      {"exaggeration-hard-switch", {PresetKind::ExaggerationHardSwitch}, "exaggeration, hard switch schedule"},
      {"exaggeration-ramp-up", {PresetKind::ExaggerationRampUp}, "exaggeration, linear ramp into deception"},
      {"exaggeration-ramp-down", {PresetKind::ExaggerationRampDown}, "exaggeration, linear ramp out of deception"},
      {"ambiguity-hard-switch", {PresetKind::AmbiguityHardSwitch}, "ambiguity, hard switch schedule"},
      {"ambiguity-ramp-up", {PresetKind::AmbiguityRampUp}, "ambiguity, linear ramp into deception"},
      {"ambiguity-ramp-down", {PresetKind::AmbiguityRampDown}, "ambiguity, linear ramp out of deception"},
      {"obstacle-exaggeration", {PresetKind::ObstacleExaggeration}, "exaggeration around a rectangular obstacle"},
      {"moving-false-goal-slow",
       {PresetKind::MovingFalseGoal, kSlowFalseGoalSpeed},
       "exaggeration toward a false goal sweeping down at 0.4 cells/step"},
      {"moving-false-goal-fast",
       {PresetKind::MovingFalseGoal, kFastFalseGoalSpeed},
       "exaggeration toward a false goal sweeping down at 2.0 cells/step"},
      {"budget-team-a", {PresetKind::BudgetTeam, 2.0, 'a'}, "two agents, rates (1,4), shared start"},
      {"budget-team-b", {PresetKind::BudgetTeam, 2.0, 'b'}, "two agents, rates (1,1), shared start"},
      {"budget-team-c", {PresetKind::BudgetTeam, 2.0, 'c'}, "two agents, rates (1,1), distinct starts"},
      {"budget-team-d", {PresetKind::BudgetTeam, 2.0, 'd'}, "two agents, rates (1,4), distinct starts"},
      {"volleyball-up", {PresetKind::Volleyball, 2.0, 'a', true}, "3-1 split, false corridor on the right"},
      {"volleyball-down", {PresetKind::Volleyball, 2.0, 'a', false}, "3-1 split, mirrored court"},
  };
  return catalog;
}

inline ScenarioPreset parse_preset(std::string_view name, int scale = 1) {
  for (const auto& info : preset_catalog()) {
    if (info.name == name) {
      ScenarioPreset p = info.preset;
      p.scale = scale;
      return p;
    }
  }
  throw UnknownPreset("unknown preset '" + std::string(name) + "'");
}

// What the harness should compute for a built scenario.
struct MetricPlan {
  Cell goal;
  Cell decoy;
  bool cal = false;
  bool ambiguity = false;
  std::optional<std::pair<int, int>> deception_window;  // [begin, end) steps with u = 1
  bool deviation = false;
  bool budget = false;
  bool split = false;
  double x_mid = 0.0;
  std::vector<std::size_t> runners;
  int sigma_false = +1;
  int sigma_true = -1;
};

struct Scenario {
  std::string name;
  ScenarioPreset preset;
  GridWorld world;
  std::variant<SingleAgentConfig, TeamConfig> config;
  MetricPlan metrics;
  std::vector<std::string> scale_log;

  bool is_team() const { return std::holds_alternative<TeamConfig>(config); }
  const SingleAgentConfig& single() const { return std::get<SingleAgentConfig>(config); }
  const TeamConfig& team() const { return std::get<TeamConfig>(config); }
  SingleAgentConfig& single() { return std::get<SingleAgentConfig>(config); }
  TeamConfig& team() { return std::get<TeamConfig>(config); }
};

namespace detail {

class Scaler {
 public:
  explicit Scaler(int scale) : scale_(scale) {
    if (scale < 1) throw InvalidArgument("scale must be >= 1");
  }

  // Divides by the scale and rounds; non-zero constants never drop below 1.
  int operator()(std::string_view what, int value) {
    if (scale_ == 1 || value == 0) return value;
    const int out = std::max(1, static_cast<int>(std::lround(static_cast<double>(value) / scale_)));
    log_.push_back(std::string(what) + ": " + std::to_string(value) + " -> " + std::to_string(out));
    return out;
  }

  double real(std::string_view what, double value) {
    if (scale_ == 1) return value;
    const double out = value / scale_;
    log_.push_back(std::string(what) + ": " + std::to_string(value) + " -> " + std::to_string(out));
    return out;
  }

  int scale() const noexcept { return scale_; }
  std::vector<std::string> take_log() { return std::move(log_); }

 private:
  int scale_;
  std::vector<std::string> log_;
};

inline Cell at_fraction(double fx, double fy, int w, int h) {
  return {static_cast<int>(std::lround(fx * w)), static_cast<int>(std::lround(fy * h))};
}

struct SchedulePreset {
  int start;
  int length;
  int ramp_up;
  int ramp_down;
};

inline PiecewiseSchedule scaled_schedule(Scaler& sc, SchedulePreset s) {
  PiecewiseSchedule out;
  out.start = sc("S", s.start);
  out.length = sc("L", s.length);
  out.ramp_up = sc("r_up", s.ramp_up);
  out.ramp_down = sc("r_down", s.ramp_down);
  out.validate();
  return out;
}

inline constexpr int kDeceptionGrid = 375;
inline constexpr int kMargin = 5;

struct DeceptionGains {
  DeceptionForm form;
  double kappa;
  double alpha;
  SchedulePreset schedule;
};

inline DeceptionGains gains_for(PresetKind kind) {
  constexpr double kappa_exag = 10.0;
  constexpr double alpha_exag = 4.0;
  constexpr double gain_amb = 4.0;
  switch (kind) {
    case PresetKind::ExaggerationHardSwitch:
    case PresetKind::ObstacleExaggeration:
    case PresetKind::MovingFalseGoal:
      return {DeceptionForm::Exaggeration, kappa_exag, alpha_exag, {40, 300, 0, 0}};
    case PresetKind::ExaggerationRampUp:
      return {DeceptionForm::Exaggeration, kappa_exag, alpha_exag, {40, 300, 100, 0}};
    case PresetKind::ExaggerationRampDown:
      return {DeceptionForm::Exaggeration, kappa_exag, alpha_exag, {40, 300, 0, 100}};
    case PresetKind::AmbiguityHardSwitch:
      return {DeceptionForm::Ambiguity, gain_amb, gain_amb, {40, 250, 0, 0}};
    case PresetKind::AmbiguityRampUp:
      return {DeceptionForm::Ambiguity, gain_amb, gain_amb, {40, 250, 100, 0}};
    case PresetKind::AmbiguityRampDown:
      return {DeceptionForm::Ambiguity, gain_amb, gain_amb, {40, 250, 0, 100}};
    default:
      throw InvalidArgument("not a single-agent deception preset");
  }
}

inline Scenario build_single(const ScenarioPreset& p) {
  Scaler sc(p.scale);
  const int W = sc("width", kDeceptionGrid);
  const int H = sc("height", kDeceptionGrid);
  const bool moving = p.kind == PresetKind::MovingFalseGoal;

  std::set<Cell> obstacles;
  if (p.kind == PresetKind::ObstacleExaggeration) {
    const Cell lo = at_fraction(0.25, 0.35, W, H);
    const Cell hi = at_fraction(0.45, 0.50, W, H);
    for (int x = lo.x; x <= hi.x; ++x)
      for (int y = lo.y; y <= hi.y; ++y) obstacles.insert({x, y});
  }
  GridWorld world(W, H, obstacles, kMargin);

  const DeceptionGains g = gains_for(p.kind);
  SingleAgentConfig cfg;
  cfg.K = 3;
  cfg.M = 1;
  cfg.lambda = 0.8;
  cfg.cost.form = g.form;
  cfg.cost.aggregation = PathAggregation::SumOverPath;
  cfg.cost.schedule = ScheduledGains{scaled_schedule(sc, g.schedule), g.kappa, g.alpha};

  Cell decoy;
  if (moving) {
    cfg.start = world.clamp_to_bounds(at_fraction(0.85, 0.05, W, H));
    cfg.layout.true_goal = world.clamp_to_bounds(at_fraction(0.85, 0.90, W, H));
    decoy = world.clamp_to_grid(at_fraction(0.15, 0.95, W, H));
    cfg.false_goal_track = MovingGoalTrack{decoy, 0.0, -p.speed, W, H};
  } else {
    cfg.start = world.clamp_to_bounds(at_fraction(0.50, 0.05, W, H));
    cfg.layout.true_goal = world.clamp_to_bounds(at_fraction(0.85, 0.90, W, H));
    decoy = world.clamp_to_bounds(at_fraction(0.15, 0.90, W, H));
  }
  cfg.layout.false_goals = {decoy};
  cfg.validate();

  Scenario out{"", p, world, cfg, {}, sc.take_log()};
  out.metrics.goal = cfg.layout.true_goal;
  out.metrics.decoy = decoy;
  out.metrics.cal = g.form == DeceptionForm::Exaggeration;
  out.metrics.ambiguity = g.form == DeceptionForm::Ambiguity;
  const PiecewiseSchedule& s = cfg.cost.schedule->schedule;
  out.metrics.deception_window = std::pair{s.start + s.ramp_up, s.start + s.length - s.ramp_down};
  return out;
}

inline Scenario build_budget(const ScenarioPreset& p) {
  if (p.budget_case < 'a' || p.budget_case > 'd') throw UnknownPreset("budget case must be a..d");
  Scaler sc(p.scale);
  const int side = sc("width", 200);
  GridWorld world(side, side, {}, kMargin);

  const bool asymmetric = p.budget_case == 'a' || p.budget_case == 'd';
  const bool distinct = p.budget_case == 'c' || p.budget_case == 'd';
  const std::vector<double> rates = asymmetric ? std::vector<double>{1.0, 4.0} : std::vector<double>{1.0, 1.0};

  const Cell goal = world.clamp_to_bounds(at_fraction(0.70, 0.90, side, side));
  const Cell decoy = world.clamp_to_bounds(at_fraction(0.20, 0.70, side, side));
  const std::array<Cell, 2> starts =
      distinct ? std::array<Cell, 2>{world.clamp_to_bounds(at_fraction(0.40, 0.05, side, side)),
                                     world.clamp_to_bounds(at_fraction(0.60, 0.05, side, side))}
               : std::array<Cell, 2>{world.clamp_to_bounds(at_fraction(0.50, 0.05, side, side)),
                                     world.clamp_to_bounds(at_fraction(0.50, 0.05, side, side))};

  TeamConfig team;
  for (std::size_t i = 0; i < 2; ++i) {
    SingleAgentConfig a;
    a.start = starts[i];
    a.layout.true_goal = goal;
    a.layout.false_goals = {decoy};
    a.K = 1;
    a.M = 1;
    a.lambda = 0.6;
    team.agents.push_back(a);
  }
  CouplingSpec energy;
  energy.members = {0, 1};
  energy.kind = CouplingKind::EnergyPenalty;
  energy.params.alpha = 0.45;
  energy.params.rates = rates;
  team.couplings = {energy};
  team.lambda_vec = RationalityVector({0.6, 0.6, 0.6});
  team.mode = TeamMode::JointExhaustive;
  team.budget = TeamBudget{static_cast<double>(sc("B_team", 1500)), 0.3, rates};
  team.objective = TeamObjective::BudgetDeception;
  team.budget_deception = BudgetDeceptionParams{{1.0, 1.0}, TriangularRamp{0.5, 15.0}};
  team.validate();

  Scenario out{"", p, world, team, {}, sc.take_log()};
  out.metrics.goal = goal;
  out.metrics.decoy = decoy;
  out.metrics.deviation = true;
  out.metrics.budget = true;
  return out;
}

// 18 x 12 court, net along the top row, centreline at x = 9. Agent 0 is the
// setter; agents 1..4 are runners. The "down" orientation mirrors x.
inline Scenario build_volleyball(const ScenarioPreset& p) {
  constexpr int W = 18;
  constexpr int H = 12;
  GridWorld world(W, H, {}, 0);
  const auto mirror = [&](Cell c) { return p.side_up ? c : Cell{W - 1 - c.x, c.y}; };

  const Cell setter_start = mirror({9, 4});
  const Cell setter_ref = mirror({9, 10});
  const std::array<Cell, 4> runner_starts = {mirror({2, 1}), mirror({6, 1}), mirror({11, 1}), mirror({15, 1})};
  // Three slots in the false corridor, one in the true corridor.
  const std::vector<Cell> slots = {mirror({12, 10}), mirror({14, 10}), mirror({13, 8}), mirror({4, 10})};

  TeamConfig team;
  const auto agent = [&](Cell start, Cell target) {
    SingleAgentConfig a;
    a.start = start;
    a.layout.true_goal = target;
    a.K = 1;
    a.M = 1;
    a.lambda = 6.5;
    a.cost.aggregation = PathAggregation::TerminalOnly;
    return a;
  };
  team.agents.push_back(agent(setter_start, setter_ref));
  for (std::size_t r = 0; r < runner_starts.size(); ++r) team.agents.push_back(agent(runner_starts[r], slots[r]));

  const double x_mid = W / 2.0;
  const int sigma_false = side_of(slots[0], x_mid);
  const int sigma_true = side_of(slots[3], x_mid);

  CouplingSpec split;
  split.members = {1, 2, 3, 4};
  split.kind = CouplingKind::VolleyballSplit;
  split.params.gamma_false = 12.0;
  split.params.gamma_true = 12.0;
  split.params.target_false = 3.0;
  split.params.target_true = 1.0;
  split.params.x_mid = x_mid;
  split.params.sigma_false = sigma_false;
  split.params.sigma_true = sigma_true;
  split.params.with_repulsion = true;
  split.params.gamma_sep = 0.5;
  split.params.epsilon = 0.1;
  team.couplings = {split};
  team.lambda_vec = RationalityVector(std::vector<double>(team.agents.size() + 2, 6.5));
  team.mode = TeamMode::JointExhaustive;
  team.objective = TeamObjective::ReferenceTracking;
  team.roles = ReferenceRoles{0, setter_ref, {1, 2, 3, 4}, slots};
  team.fixed_duration = 22;
  team.validate();

  Scenario out{"", p, world, team, {}, {}};
  if (p.scale != 1) out.scale_log.push_back("scale ignored: the court has fixed dimensions");
  out.metrics.goal = slots[3];
  out.metrics.decoy = slots[0];
  out.metrics.split = true;
  out.metrics.x_mid = x_mid;
  out.metrics.runners = {1, 2, 3, 4};
  out.metrics.sigma_false = sigma_false;
  out.metrics.sigma_true = sigma_true;
  return out;
}

}  // namespace detail

inline std::string preset_name(const ScenarioPreset& p) {
  for (const auto& info : preset_catalog()) {
    ScenarioPreset probe = p;
    probe.scale = info.preset.scale;
    if (info.preset == probe) return std::string(info.name);
  }
  if (p.kind == PresetKind::MovingFalseGoal) return "moving-false-goal-" + std::to_string(p.speed);
  throw UnknownPreset("preset has no catalog name");
}

inline Scenario build(const ScenarioPreset& p) {
  Scenario s = [&] {
    switch (p.kind) {
      case PresetKind::BudgetTeam:
        return detail::build_budget(p);
      case PresetKind::Volleyball:
        return detail::build_volleyball(p);
      default:
        return detail::build_single(p);
    }
  }();
  s.name = preset_name(p);
  return s;
}

inline Scenario build(std::string_view name, int scale = 1) { return build(parse_preset(name, scale)); }

}  // namespace dpp
