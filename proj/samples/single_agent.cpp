// Plans one exaggeration episode on a small grid and prints the path.
#include <iostream>

#include "dpp/dpp.hpp"

int main() {
  const dpp::GridWorld world(40, 40, {}, 2);

  dpp::SingleAgentConfig cfg;
  cfg.start = {20, 2};
  cfg.layout.true_goal = {34, 36};
  cfg.layout.false_goals = {{6, 36}};
  cfg.K = 3;
  cfg.lambda = 0.8;
  cfg.cost.schedule = dpp::ScheduledGains{{5, 30, 0, 0}, 10.0, 4.0};

  dpp::Rng rng(dpp::Rng::split(2024, 0));
  const dpp::TrajectoryLog log = dpp::plan_episode(cfg, world, rng);

  std::cout << "steps: " << log.steps() << '\n';
  std::cout << "CAL: " << dpp::cal(log, cfg.layout.true_goal, cfg.layout.false_goals.front()) << '\n';
  for (const dpp::Cell& c : log.states) std::cout << c.x << ',' << c.y << '\n';
}
