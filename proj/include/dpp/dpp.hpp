#pragma once

// Planning core. The Monte-Carlo harness lives in dpp/harness.hpp and
// additionally needs nlohmann_json.
#include "dpp/errors.hpp"
#include "dpp/world.hpp"
#include "dpp/rng.hpp"
#include "dpp/horizon.hpp"
#include "dpp/cost.hpp"
#include "dpp/policy.hpp"
#include "dpp/moving_goal.hpp"
#include "dpp/planner_single.hpp"
#include "dpp/metrics.hpp"
#include "dpp/planner_multi.hpp"
#include "dpp/scenarios.hpp"
