#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dpp/harness.hpp"

namespace {

std::set<std::string> parse_emit(const std::string& list) {
  std::set<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.insert(item);
  return out;
}

int report(const std::string& category, const std::exception& e, int code) {
  std::cerr << dpp::error_record(category, e) << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Receding-horizon deceptive path planning: Monte-Carlo driver"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run seeded trials of a preset or config file");
  std::string preset;
  std::string config;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<int> scale;
  std::optional<std::string> out_dir;
  std::optional<std::string> emit;
  std::optional<unsigned> parallel;
  run->add_option("preset", preset, "preset name (see list-presets)");
  run->add_option("--config", config, "JSON run configuration");
  run->add_option("--trials", trials, "number of trials");
  run->add_option("--seed", seed, "64-bit master seed");
  run->add_option("--scale", scale, "divisor for grid sizes and temporal constants");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--emit", emit, "comma list of trajectories,heatmap,metrics,summary");
  run->add_option("--parallel", parallel, "worker threads (0 = all cores, 1 = reference mode)");

  auto* list = app.add_subcommand("list-presets", "print the preset catalog");

  auto* validate = app.add_subcommand("validate", "check a config file without running");
  std::string validate_path;
  validate->add_option("--config", validate_path, "JSON run configuration")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : dpp::kExitConfig;
  }

  if (*list) {
    for (const auto& info : dpp::preset_catalog()) std::cout << info.name << "\t" << info.summary << '\n';
    return dpp::kExitOk;
  }

  if (*validate) {
    try {
      const dpp::LoadedConfig cfg = dpp::load_config(validate_path);
      const dpp::Scenario s = dpp::prepare(cfg.spec, cfg.overrides);
      std::cout << "{\"valid\":true,\"preset\":\"" << s.name << "\"}\n";
      return dpp::kExitOk;
    } catch (const dpp::Error& e) {
      return report("config", e, dpp::kExitConfig);
    }
  }

  dpp::RunSpec spec;
  dpp::Overrides overrides;
  try {
    if (!config.empty()) {
      dpp::LoadedConfig cfg = dpp::load_config(config);
      spec = cfg.spec;
      overrides = cfg.overrides;
    }
    if (!preset.empty()) spec.preset = preset;
    if (trials) spec.trials = *trials;
    if (seed) spec.seed = *seed;
    if (scale) spec.scale = *scale;
    if (out_dir) spec.output_dir = *out_dir;
    if (emit) spec.emit = parse_emit(*emit);
    if (parallel) spec.parallel = *parallel;
    dpp::prepare(spec, overrides);
  } catch (const dpp::Error& e) {
    return report("config", e, dpp::kExitConfig);
  }

  try {
    const dpp::RunOutcome outcome = dpp::run(spec, overrides);
    for (const auto& path : outcome.written) std::cout << path.string() << '\n';
    if (outcome.exit_code == dpp::kExitStepCap)
      std::cerr << "{\"error\":\"step_cap\",\"message\":\"step cap exceeded beyond tolerance\"}\n";
    if (outcome.exit_code == dpp::kExitInfeasible)
      std::cerr << "{\"error\":\"no_feasible_joint\",\"message\":\"a trial exhausted its budget\"}\n";
    return outcome.exit_code;
  } catch (const std::exception& e) {
    return report("runtime", e, dpp::kExitFailure);
  }
}
