#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "dpp/errors.hpp"
#include "dpp/metrics.hpp"
#include "dpp/planner_multi.hpp"
#include "dpp/planner_single.hpp"
#include "dpp/rng.hpp"
#include "dpp/scenarios.hpp"

namespace dpp {

inline constexpr const char* kConfigSchema = "dpp-run/1";

inline const std::vector<std::string>& emit_kinds() {
  static const std::vector<std::string> kinds = {"trajectories", "heatmap", "metrics", "summary"};
  return kinds;
}

struct RunSpec {
  std::string preset;
  std::optional<std::filesystem::path> config_path;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  int scale = 1;
  std::filesystem::path output_dir = "out";
  std::set<std::string> emit{emit_kinds().begin(), emit_kinds().end()};
  unsigned parallel = 0;            // 0 = all hardware threads
  double step_cap_tolerance = 0.0;  // fraction of trials allowed to hit the step cap

  void validate() const {
    if (preset.empty()) throw ParseError("preset", "a preset name is required");
    if (trials < 1) throw ParseError("trials", "trials must be >= 1");
    if (scale < 1) throw ParseError("scale", "scale must be >= 1");
    for (const auto& e : emit)
      if (std::find(emit_kinds().begin(), emit_kinds().end(), e) == emit_kinds().end())
        throw ParseError("emit", "unknown emit kind '" + e + "'");
    if (step_cap_tolerance < 0.0 || step_cap_tolerance > 1.0)
      throw ParseError("step_cap_tolerance", "must lie in [0,1]");
  }
};

struct ScheduleOverride {
  std::optional<int> start;
  std::optional<int> length;
  std::optional<int> ramp_up;
  std::optional<int> ramp_down;
};

// Values replacing preset constants after the preset is built (post-scaling).
struct Overrides {
  std::optional<double> lambda;
  std::optional<int> horizon;
  std::optional<int> execute_steps;
  std::optional<int> max_steps;
  std::optional<std::string> aggregation;    // "sum" | "terminal"
  std::optional<std::string> obstacle_mode;  // "penalize" | "exclude"
  std::optional<int> beam_width;
  std::optional<double> kappa;
  std::optional<double> alpha;
  ScheduleOverride schedule;
  std::optional<double> team_budget;
  std::optional<double> gamma;
  std::optional<double> coupling_alpha;
  std::optional<double> beta_rate_exponent;
  std::optional<std::size_t> joint_cap;
  std::optional<int> duration;
};

struct LoadedConfig {
  RunSpec spec;
  Overrides overrides;
};

namespace detail {

inline int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

inline int line_of_key(const std::string& text, const std::string& key) {
  const auto pos = text.find("\"" + key + "\"");
  return pos == std::string::npos ? 0 : line_of_offset(text, pos);
}

class ConfigReader {
 public:
  explicit ConfigReader(std::string text) : text_(std::move(text)) {}

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    const int line = line_of_key(text_, field.substr(field.rfind('.') + 1));
    throw ParseError(field, (line > 0 ? "line " + std::to_string(line) + ": " : std::string()) + field + ": " + what);
  }

  void reject_unknown(const nlohmann::json& obj, const std::string& prefix, std::initializer_list<const char*> keys) {
    if (!obj.is_object()) fail(prefix.empty() ? "<root>" : prefix, "expected an object");
    for (const auto& [key, _] : obj.items()) {
      const bool known = std::any_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; });
      if (!known) fail(prefix.empty() ? key : prefix + "." + key, "unknown key");
    }
  }

  template <class T>
  std::optional<T> get(const nlohmann::json& obj, const std::string& key, const std::string& prefix = {}) {
    if (!obj.contains(key)) return std::nullopt;
    const std::string field = prefix.empty() ? key : prefix + "." + key;
    const auto& v = obj.at(key);
    if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) fail(field, "expected a string");
    } else if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) fail(field, "expected a number");
    } else if constexpr (std::is_unsigned_v<T>) {
      if (!v.is_number_unsigned()) fail(field, "expected a non-negative integer");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) fail(field, "expected an integer");
    }
    return v.get<T>();
  }

  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

}  // namespace detail

// Strict parse: unknown keys and ill-typed values raise ParseError naming the field.
inline LoadedConfig parse_config(const std::string& text) {
  detail::ConfigReader rd(text);
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("<document>",
                     "line " + std::to_string(detail::line_of_offset(text, e.byte)) + ": malformed JSON: " + e.what());
  }
  rd.reject_unknown(root, "",
                    {"schema", "preset", "trials", "seed", "scale", "output_dir", "emit", "parallel",
                     "step_cap_tolerance", "overrides"});

  LoadedConfig out;
  if (auto schema = rd.get<std::string>(root, "schema"); schema && *schema != kConfigSchema)
    rd.fail("schema", "unsupported schema '" + *schema + "', expected '" + kConfigSchema + "'");
  if (auto v = rd.get<std::string>(root, "preset")) out.spec.preset = *v;
  if (auto v = rd.get<std::uint64_t>(root, "trials")) out.spec.trials = static_cast<std::size_t>(*v);
  if (auto v = rd.get<std::uint64_t>(root, "seed")) out.spec.seed = *v;
  if (auto v = rd.get<int>(root, "scale")) out.spec.scale = *v;
  if (auto v = rd.get<std::string>(root, "output_dir")) out.spec.output_dir = *v;
  if (auto v = rd.get<unsigned>(root, "parallel")) out.spec.parallel = *v;
  if (auto v = rd.get<double>(root, "step_cap_tolerance")) out.spec.step_cap_tolerance = *v;
  if (root.contains("emit")) {
    const auto& e = root.at("emit");
    if (!e.is_array()) rd.fail("emit", "expected an array of strings");
    out.spec.emit.clear();
    for (const auto& item : e) {
      if (!item.is_string()) rd.fail("emit", "expected an array of strings");
      out.spec.emit.insert(item.get<std::string>());
    }
  }

  if (root.contains("overrides")) {
    const auto& o = root.at("overrides");
    rd.reject_unknown(o, "overrides",
                      {"lambda", "horizon", "execute_steps", "max_steps", "aggregation", "obstacle_mode", "beam_width",
                       "kappa", "alpha", "schedule", "team_budget", "gamma", "coupling_alpha", "beta_rate_exponent",
                       "joint_cap", "duration"});
    const std::string p = "overrides";
    Overrides& ov = out.overrides;
    ov.lambda = rd.get<double>(o, "lambda", p);
    ov.horizon = rd.get<int>(o, "horizon", p);
    ov.execute_steps = rd.get<int>(o, "execute_steps", p);
    ov.max_steps = rd.get<int>(o, "max_steps", p);
    ov.aggregation = rd.get<std::string>(o, "aggregation", p);
    ov.obstacle_mode = rd.get<std::string>(o, "obstacle_mode", p);
    ov.beam_width = rd.get<int>(o, "beam_width", p);
    ov.kappa = rd.get<double>(o, "kappa", p);
    ov.alpha = rd.get<double>(o, "alpha", p);
    ov.team_budget = rd.get<double>(o, "team_budget", p);
    ov.gamma = rd.get<double>(o, "gamma", p);
    ov.coupling_alpha = rd.get<double>(o, "coupling_alpha", p);
    ov.beta_rate_exponent = rd.get<double>(o, "beta_rate_exponent", p);
    if (auto cap = rd.get<std::uint64_t>(o, "joint_cap", p)) ov.joint_cap = static_cast<std::size_t>(*cap);
    ov.duration = rd.get<int>(o, "duration", p);
    if (ov.aggregation && *ov.aggregation != "sum" && *ov.aggregation != "terminal")
      rd.fail("overrides.aggregation", "expected \"sum\" or \"terminal\"");
    if (ov.obstacle_mode && *ov.obstacle_mode != "penalize" && *ov.obstacle_mode != "exclude")
      rd.fail("overrides.obstacle_mode", "expected \"penalize\" or \"exclude\"");
    if (o.contains("schedule")) {
      const auto& s = o.at("schedule");
      const std::string sp = "overrides.schedule";
      rd.reject_unknown(s, sp, {"start", "length", "ramp_up", "ramp_down"});
      ov.schedule.start = rd.get<int>(s, "start", sp);
      ov.schedule.length = rd.get<int>(s, "length", sp);
      ov.schedule.ramp_up = rd.get<int>(s, "ramp_up", sp);
      ov.schedule.ramp_down = rd.get<int>(s, "ramp_down", sp);
    }
  }
  return out;
}

inline LoadedConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("<file>", "cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  LoadedConfig cfg = parse_config(ss.str());
  cfg.spec.config_path = path;
  cfg.spec.validate();
  return cfg;
}

namespace detail {

inline void override_agent(SingleAgentConfig& a, const Overrides& ov) {
  if (ov.lambda) a.lambda = *ov.lambda;
  if (ov.horizon) a.K = *ov.horizon;
  if (ov.execute_steps) a.M = *ov.execute_steps;
  if (ov.max_steps) a.max_steps = *ov.max_steps;
  if (ov.aggregation)
    a.cost.aggregation = *ov.aggregation == "sum" ? PathAggregation::SumOverPath : PathAggregation::TerminalOnly;
  if (ov.obstacle_mode)
    a.obstacle_mode = *ov.obstacle_mode == "penalize" ? ObstacleMode::Penalize : ObstacleMode::Exclude;
  if (ov.beam_width) a.prune = PrunePolicy::beam(*ov.beam_width);
  if (a.cost.schedule) {
    ScheduledGains& g = *a.cost.schedule;
    if (ov.kappa) g.kappa = *ov.kappa;
    if (ov.alpha) g.alpha = *ov.alpha;
    if (ov.schedule.start) g.schedule.start = *ov.schedule.start;
    if (ov.schedule.length) g.schedule.length = *ov.schedule.length;
    if (ov.schedule.ramp_up) g.schedule.ramp_up = *ov.schedule.ramp_up;
    if (ov.schedule.ramp_down) g.schedule.ramp_down = *ov.schedule.ramp_down;
  }
}

}  // namespace detail

inline void apply_overrides(Scenario& s, const Overrides& ov) {
  try {
    if (s.is_team()) {
      TeamConfig& team = s.team();
      for (auto& a : team.agents) detail::override_agent(a, ov);
      if (ov.lambda) team.lambda_vec = RationalityVector(std::vector<double>(team.lambda_vec.size(), *ov.lambda));
      if (ov.max_steps) team.max_steps = *ov.max_steps;
      if (ov.joint_cap) team.joint_cap = *ov.joint_cap;
      if (ov.duration) team.fixed_duration = *ov.duration;
      if (team.budget) {
        if (ov.team_budget) team.budget->total = *ov.team_budget;
        if (ov.gamma) team.budget->gamma = *ov.gamma;
      }
      if (team.budget_deception && ov.beta_rate_exponent) team.budget_deception->rate_exponent = *ov.beta_rate_exponent;
      for (auto& c : team.couplings)
        if (c.kind == CouplingKind::EnergyPenalty && ov.coupling_alpha) c.params.alpha = *ov.coupling_alpha;
      team.validate();
    } else {
      detail::override_agent(s.single(), ov);
      s.single().validate();
    }
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError("overrides", e.what());
  }
}

enum class TrialStatus { Ok, StepCap, Infeasible };

inline const char* to_string(TrialStatus s) {
  switch (s) {
    case TrialStatus::Ok:
      return "ok";
    case TrialStatus::StepCap:
      return "step_cap";
    case TrialStatus::Infeasible:
      return "no_feasible_joint";
  }
  return "?";
}

struct AgentMetrics {
  std::optional<double> cal;
  std::optional<double> ambiguity_mean;
  std::optional<double> deviation_area;
  std::optional<double> early_decoy_approach;
};

struct TrialResult {
  std::size_t trial = 0;
  TrialStatus status = TrialStatus::Ok;
  std::string message;
  std::vector<TrajectoryLog> logs;
  std::vector<BudgetState> meters;
  std::vector<AgentMetrics> agent_metrics;
  std::size_t budget_violations = 0;
  std::optional<SideCounts> final_split;
};

inline std::uint64_t child_seed(std::uint64_t seed, std::size_t trial) { return Rng::split(seed, trial); }

namespace detail {

inline double window_mean(std::span<const double> trace, const std::optional<std::pair<int, int>>& window) {
  if (!window) return mean(trace);
  double sum = 0.0;
  std::size_t n = 0;
  for (int t = window->first; t < window->second && t < static_cast<int>(trace.size()); ++t) {
    sum += trace[static_cast<std::size_t>(t)];
    ++n;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

inline const CouplingSpec* split_coupling(const TeamConfig& team) {
  for (const auto& c : team.couplings)
    if (c.kind == CouplingKind::VolleyballSplit) return &c;
  return nullptr;
}

inline void compute_metrics(const Scenario& s, TrialResult& r) {
  const MetricPlan& plan = s.metrics;
  for (std::size_t i = 0; i < r.logs.size(); ++i) {
    const TrajectoryLog& log = r.logs[i];
    AgentMetrics m;
    const Cell start = log.states.empty() ? Cell{} : log.states.front();
    const Cell goal = s.is_team() ? s.team().agents[i].layout.true_goal : s.single().layout.true_goal;
    if (plan.cal && log.states.size() >= 2) m.cal = cal(log, plan.goal, plan.decoy);
    if (plan.ambiguity) m.ambiguity_mean = window_mean(ambiguity_trace(log, plan.goal, plan.decoy), plan.deception_window);
    if (plan.deviation || plan.cal) m.deviation_area = deviation_area(log.states, start, goal);
    if (plan.cal) m.early_decoy_approach = early_decoy_approach(log.states, plan.decoy, 0.25);
    r.agent_metrics.push_back(m);
  }
  if (plan.budget && s.is_team() && s.team().budget) {
    const TeamBudget& b = *s.team().budget;
    for (const BudgetState& st : r.meters)
      if (st.consumed > b.total + 1e-9 || st.deviation_used > b.d_max() + 1e-9) ++r.budget_violations;
  }
  if (plan.split && !r.logs.empty()) {
    std::vector<Cell> final_states;
    for (const auto& log : r.logs) final_states.push_back(log.states.back());
    r.final_split = side_counts(final_states, plan.runners, plan.x_mid, plan.sigma_false, plan.sigma_true);
  }
}

}  // namespace detail

inline TrialResult run_trial(const Scenario& s, std::uint64_t seed, std::size_t k) {
  TrialResult r;
  r.trial = k;
  Rng rng(child_seed(seed, k));
  try {
    if (s.is_team()) {
      TeamOutcome o = plan_team(s.team(), s.world, rng);
      r.logs = std::move(o.logs);
      r.meters = std::move(o.meters);
    } else {
      r.logs.push_back(plan_episode(s.single(), s.world, rng));
    }
  } catch (const StepCapExceeded& e) {
    r.status = TrialStatus::StepCap;
    r.message = e.what();
    r.logs = e.partial();
  } catch (const NoFeasibleJoint& e) {
    r.status = TrialStatus::Infeasible;
    r.message = e.what();
  }
  detail::compute_metrics(s, r);
  return r;
}

// Trials are independent; results land in their own slot and are merged in trial order.
inline std::vector<TrialResult> run_trials(const Scenario& s, std::uint64_t seed, std::size_t trials, unsigned parallel) {
  std::vector<TrialResult> results(trials);
  unsigned workers = parallel == 0 ? std::max(1u, std::thread::hardware_concurrency()) : parallel;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, trials));
  if (workers <= 1) {
    for (std::size_t k = 0; k < trials; ++k) results[k] = run_trial(s, seed, k);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t k = next++; k < trials; k = next++) results[k] = run_trial(s, seed, k);
      } catch (...) {
        errors[w] = std::current_exception();
        next = trials;
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

inline std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline std::string trajectories_csv(const std::vector<TrialResult>& results) {
  std::string out = "trial,agent,t,x,y\n";
  for (const auto& r : results)
    for (std::size_t i = 0; i < r.logs.size(); ++i)
      for (std::size_t t = 0; t < r.logs[i].states.size(); ++t) {
        const Cell& c = r.logs[i].states[t];
        out += std::to_string(r.trial) + ',' + std::to_string(i) + ',' + std::to_string(t) + ',' +
               std::to_string(c.x) + ',' + std::to_string(c.y) + '\n';
      }
  return out;
}

inline std::string metrics_csv(const std::vector<TrialResult>& results) {
  std::string out =
      "trial,agent,status,steps,reached_goal,cal,ambiguity_mean,deviation_area,early_decoy_approach,"
      "consumed,deviation_used,budget_violations,s_false,s_true\n";
  const auto opt = [](const std::optional<double>& v) { return v ? format_real(*v) : std::string(); };
  for (const auto& r : results) {
    const std::string consumed = r.meters.empty() ? "" : format_real(r.meters.back().consumed);
    const std::string used = r.meters.empty() ? "" : format_real(r.meters.back().deviation_used);
    const std::string sf = r.final_split ? format_real(r.final_split->false_side) : "";
    const std::string st = r.final_split ? format_real(r.final_split->true_side) : "";
    for (std::size_t i = 0; i < r.logs.size(); ++i) {
      const AgentMetrics& m = r.agent_metrics[i];
      out += std::to_string(r.trial) + ',' + std::to_string(i) + ',' + to_string(r.status) + ',' +
             std::to_string(r.logs[i].steps()) + ',' + (r.logs[i].reached_goal ? "1" : "0") + ',' + opt(m.cal) +
             ',' + opt(m.ambiguity_mean) + ',' + opt(m.deviation_area) + ',' + opt(m.early_decoy_approach) + ',' +
             consumed + ',' + used + ',' + std::to_string(r.budget_violations) + ',' + sf + ',' + st + '\n';
    }
  }
  return out;
}

inline Heatmap merged_heatmap(const std::vector<TrialResult>& results, const GridWorld& world) {
  Heatmap total(world.width(), world.height());
  for (const auto& r : results) total.merge(accumulate_heatmap(r.logs, world));
  return total;
}

// Dense grid, one line per row y = 0..height-1.
inline std::string heatmap_csv(const Heatmap& h) {
  std::string out;
  for (int y = 0; y < h.height; ++y) {
    for (int x = 0; x < h.width; ++x) {
      if (x) out += ',';
      out += std::to_string(h.at(x, y));
    }
    out += '\n';
  }
  return out;
}

// Binary P5, maxval 65535, big-endian samples, rows y = 0..height-1, counts clipped.
inline std::string heatmap_pgm(const Heatmap& h) {
  std::string out = "P5\n" + std::to_string(h.width) + ' ' + std::to_string(h.height) + "\n65535\n";
  out.reserve(out.size() + 2 * h.counts.size());
  for (int y = 0; y < h.height; ++y)
    for (int x = 0; x < h.width; ++x) {
      const auto v = static_cast<std::uint16_t>(std::min<std::uint64_t>(h.at(x, y), 65535));
      out += static_cast<char>(v >> 8);
      out += static_cast<char>(v & 0xff);
    }
  return out;
}

inline void write_atomic(const std::filesystem::path& path, const std::string& bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

struct RunOutcome {
  int exit_code = 0;
  std::vector<TrialResult> trials;
  Heatmap heatmap;
  nlohmann::ordered_json summary;
  std::vector<std::filesystem::path> written;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitStepCap = 3;
inline constexpr int kExitInfeasible = 4;

inline nlohmann::ordered_json summarize(const Scenario& s, const RunSpec& spec, const std::vector<TrialResult>& results,
                                        double wall_seconds) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["schema"] = kConfigSchema;
  ordered_json& cfg = j["config"];
  cfg["preset"] = s.name;
  cfg["trials"] = spec.trials;
  cfg["seed"] = spec.seed;
  cfg["scale"] = spec.scale;
  cfg["config_path"] = spec.config_path ? spec.config_path->string() : "";
  cfg["grid"] = {{"width", s.world.width()}, {"height", s.world.height()}, {"margin", s.world.boundary_margin()},
                 {"obstacles", s.world.obstacles().size()}};
  cfg["scale_log"] = s.scale_log;
  if (s.is_team()) {
    const TeamConfig& t = s.team();
    cfg["agents"] = t.agents.size();
    cfg["lambda_vec"] = t.lambda_vec.entries;
    if (t.budget)
      cfg["budget"] = {{"total", t.budget->total}, {"gamma", t.budget->gamma}, {"d_max", t.budget->d_max()},
                       {"rates", t.budget->rates}};
    if (t.fixed_duration) cfg["duration"] = *t.fixed_duration;
  } else {
    const SingleAgentConfig& a = s.single();
    cfg["lambda"] = a.lambda;
    cfg["horizon"] = a.K;
    cfg["execute_steps"] = a.M;
    cfg["start"] = {a.start.x, a.start.y};
    cfg["true_goal"] = {a.layout.true_goal.x, a.layout.true_goal.y};
    if (a.cost.schedule) {
      const auto& g = *a.cost.schedule;
      cfg["schedule"] = {{"start", g.schedule.start}, {"length", g.schedule.length}, {"ramp_up", g.schedule.ramp_up},
                         {"ramp_down", g.schedule.ramp_down}, {"kappa", g.kappa}, {"alpha", g.alpha}};
    }
  }
  cfg["decoy"] = {s.metrics.decoy.x, s.metrics.decoy.y};

  std::size_t ok = 0;
  std::size_t reached = 0;
  std::size_t logs = 0;
  double steps = 0.0;
  ordered_json status = ordered_json::array();
  for (const auto& r : results) {
    status.push_back(to_string(r.status));
    if (r.status == TrialStatus::Ok) ++ok;
    for (const auto& l : r.logs) {
      ++logs;
      steps += static_cast<double>(l.steps());
      if (l.reached_goal) ++reached;
    }
  }
  j["trial_status"] = status;
  j["wall_clock_seconds"] = wall_seconds;

  ordered_json& agg = j["aggregates"];
  agg["trials_ok"] = ok;
  agg["goal_reached_fraction"] = logs ? static_cast<double>(reached) / static_cast<double>(logs) : 0.0;
  agg["mean_steps"] = logs ? steps / static_cast<double>(logs) : 0.0;

  const auto collect = [&](auto member) {
    std::vector<double> v;
    for (const auto& r : results)
      for (const auto& m : r.agent_metrics)
        if ((m.*member)) v.push_back(*(m.*member));
    return v;
  };
  if (s.metrics.cal) {
    const auto v = collect(&AgentMetrics::cal);
    const auto neg = static_cast<double>(std::count_if(v.begin(), v.end(), [](double x) { return x < 0.0; }));
    agg["cal_mean"] = mean(v);
    agg["cal_fraction_decoy_biased"] = v.empty() ? 0.0 : neg / static_cast<double>(v.size());
    agg["early_decoy_approach_mean"] = mean(collect(&AgentMetrics::early_decoy_approach));
  }
  if (s.metrics.ambiguity) agg["ambiguity_window_mean"] = mean(collect(&AgentMetrics::ambiguity_mean));
  if (s.metrics.deviation && s.is_team()) {
    ordered_json per_agent = ordered_json::array();
    for (std::size_t i = 0; i < s.team().agents.size(); ++i) {
      std::vector<double> v;
      for (const auto& r : results)
        if (i < r.agent_metrics.size() && r.agent_metrics[i].deviation_area) v.push_back(*r.agent_metrics[i].deviation_area);
      per_agent.push_back(mean(v));
    }
    agg["deviation_area_mean_per_agent"] = per_agent;
  }
  if (s.metrics.budget) {
    std::size_t violations = 0;
    double max_used = 0.0;
    double max_consumed = 0.0;
    for (const auto& r : results) {
      violations += r.budget_violations;
      for (const auto& m : r.meters) {
        max_used = std::max(max_used, m.deviation_used);
        max_consumed = std::max(max_consumed, m.consumed);
      }
    }
    agg["budget_violations"] = violations;
    agg["max_deviation_used"] = max_used;
    agg["max_consumed"] = max_consumed;
  }
  if (s.metrics.split) {
    const CouplingSpec* split = detail::split_coupling(s.team());
    std::size_t hits = 0;
    double phi = 0.0;
    double sf = 0.0;
    double st = 0.0;
    std::size_t n = 0;
    for (const auto& r : results) {
      if (!r.final_split) continue;
      ++n;
      sf += r.final_split->false_side;
      st += r.final_split->true_side;
      if (r.final_split->false_side == 3.0 && r.final_split->true_side == 1.0) ++hits;
      if (split) phi += split_penalty(*r.final_split, split->params);
    }
    const double denom = n ? static_cast<double>(n) : 1.0;
    agg["split_target_fraction"] = static_cast<double>(hits) / denom;
    agg["split_penalty_mean"] = phi / denom;
    agg["s_false_mean"] = sf / denom;
    agg["s_true_mean"] = st / denom;
  }
  return j;
}

// Builds the scenario up front so configuration errors surface before any file is touched.
inline Scenario prepare(const RunSpec& spec, const Overrides& overrides) {
  spec.validate();
  Scenario s = [&] {
    try {
      return build(spec.preset, spec.scale);
    } catch (const UnknownPreset& e) {
      throw ParseError("preset", e.what());
    }
  }();
  apply_overrides(s, overrides);
  return s;
}

inline RunOutcome run(const RunSpec& spec, const Overrides& overrides = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  const Scenario s = prepare(spec, overrides);

  RunOutcome out;
  out.trials = run_trials(s, spec.seed, spec.trials, spec.parallel);
  out.heatmap = merged_heatmap(out.trials, s.world);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.summary = summarize(s, spec, out.trials, wall);

  std::filesystem::create_directories(spec.output_dir);
  const auto emit = [&](const std::string& kind, const std::string& file, const std::string& bytes) {
    if (!spec.emit.contains(kind)) return;
    const auto path = spec.output_dir / file;
    write_atomic(path, bytes);
    out.written.push_back(path);
  };
  emit("trajectories", "trajectories.csv", trajectories_csv(out.trials));
  emit("heatmap", "heatmap.csv", heatmap_csv(out.heatmap));
  emit("heatmap", "heatmap.pgm", heatmap_pgm(out.heatmap));
  emit("metrics", "metrics.csv", metrics_csv(out.trials));
  emit("summary", "summary.json", out.summary.dump(2) + "\n");

  std::size_t capped = 0;
  std::size_t infeasible = 0;
  for (const auto& r : out.trials) {
    capped += r.status == TrialStatus::StepCap;
    infeasible += r.status == TrialStatus::Infeasible;
  }
  if (infeasible > 0)
    out.exit_code = kExitInfeasible;
  else if (static_cast<double>(capped) > spec.step_cap_tolerance * static_cast<double>(spec.trials))
    out.exit_code = kExitStepCap;
  return out;
}

inline std::string error_record(const std::string& category, const std::exception& e) {
  nlohmann::ordered_json j;
  j["error"] = category;
  if (const auto* pe = dynamic_cast<const ParseError*>(&e)) j["field"] = pe->field();
  j["message"] = e.what();
  return j.dump();
}

}  // namespace dpp
