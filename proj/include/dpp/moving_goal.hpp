#pragma once

#include <algorithm>
#include <cmath>

#include "dpp/errors.hpp"
#include "dpp/world.hpp"

namespace dpp {

// Straight-line goal motion, rounded to the lattice and clamped to the grid.
struct MovingGoalTrack {
  Cell origin;
  double vx = 0.0;  // grid units per step
  double vy = 0.0;
  int width = 1;    // clamp bounds: [0,width) x [0,height)
  int height = 1;

  bool operator==(const MovingGoalTrack&) const = default;
};

inline Cell goal_position(const MovingGoalTrack& track, int t) {
  if (t < 0) throw InvalidArgument("goal_position needs t >= 0");
  const double x = static_cast<double>(track.origin.x) + static_cast<double>(t) * track.vx;
  const double y = static_cast<double>(track.origin.y) + static_cast<double>(t) * track.vy;
  const double cx = std::clamp(std::round(x), 0.0, static_cast<double>(track.width - 1));
  const double cy = std::clamp(std::round(y), 0.0, static_cast<double>(track.height - 1));
  return {static_cast<int>(cx), static_cast<int>(cy)};
}

}  // namespace dpp
