#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dpp/errors.hpp"

namespace dpp {

// Lattice cell, y grows upward ("North" is +y).
struct Cell {
  int x = 0;
  int y = 0;

  friend constexpr bool operator==(const Cell&, const Cell&) = default;
  friend constexpr auto operator<=>(const Cell&, const Cell&) = default;
};

inline std::string to_string(const Cell& c) {
  return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")";
}

// Declaration order is the lexicographic order used for candidate lists.
enum class Action : std::uint8_t { North = 0, East = 1, South = 2, West = 3 };

inline constexpr std::array<Action, 4> kActions = {Action::North, Action::East, Action::South,
                                                   Action::West};
inline constexpr int kBranching = 4;

constexpr Cell offset(Action a) {
  switch (a) {
    case Action::North: return {0, 1};
    case Action::East: return {1, 0};
    case Action::South: return {0, -1};
    case Action::West: return {-1, 0};
  }
  return {0, 0};
}

constexpr char action_letter(Action a) {
  constexpr char letters[] = {'N', 'E', 'S', 'W'};
  return letters[static_cast<int>(a)];
}

constexpr Cell step(Cell s, Action a) {
  const Cell d = offset(a);
  return {s.x + d.x, s.y + d.y};
}

inline double euclidean(const Cell& a, const Cell& b) {
  return std::hypot(static_cast<double>(a.x - b.x), static_cast<double>(a.y - b.y));
}

inline int manhattan(const Cell& a, const Cell& b) {
  return std::abs(a.x - b.x) + std::abs(a.y - b.y);
}

enum class ObstacleMode {
  Penalize,  // obstacle cells stay reachable; cost assigns +infinity
  Exclude,   // obstacle cells are removed from successor sets
};

// Bounded four-neighbour grid. Immutable after construction.
class GridWorld {
 public:
  GridWorld(int width, int height, std::set<Cell> obstacles = {}, int boundary_margin = 5)
      : width_(width), height_(height), margin_(boundary_margin), obstacles_(std::move(obstacles)) {
    if (width < 1 || height < 1) throw InvalidArgument("grid dimensions must be >= 1");
    if (boundary_margin < 0) throw InvalidArgument("boundary margin must be >= 0");
    if (2 * boundary_margin >= std::min(width, height))
      throw InvalidArgument("boundary margin leaves no interior");
    for (const Cell& c : obstacles_) {
      if (!in_grid(c)) throw InvalidArgument("obstacle " + to_string(c) + " outside grid");
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int boundary_margin() const noexcept { return margin_; }
  const std::set<Cell>& obstacles() const noexcept { return obstacles_; }

  bool in_grid(const Cell& c) const noexcept {
    return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_;
  }

  // Inside the margin-shrunk grid; this is the feasible state space.
  bool in_bounds(const Cell& c) const noexcept {
    return c.x >= margin_ && c.y >= margin_ && c.x < width_ - margin_ && c.y < height_ - margin_;
  }

  bool is_obstacle(const Cell& c) const { return obstacles_.contains(c); }

  Cell clamp_to_bounds(Cell c) const noexcept {
    c.x = std::clamp(c.x, margin_, width_ - 1 - margin_);
    c.y = std::clamp(c.y, margin_, height_ - 1 - margin_);
    return c;
  }

  Cell clamp_to_grid(Cell c) const noexcept {
    c.x = std::clamp(c.x, 0, width_ - 1);
    c.y = std::clamp(c.y, 0, height_ - 1);
    return c;
  }

  bool operator==(const GridWorld&) const = default;

 private:
  int width_;
  int height_;
  int margin_;
  std::set<Cell> obstacles_;
};

// One-step transition. In strict mode stepping onto an obstacle throws;
// otherwise the obstacle cell is returned and left for the cost to price.
inline Cell apply(const GridWorld& world, const Cell& s, Action a, bool strict = false) {
  const Cell next = step(s, a);
  if (!world.in_bounds(next))
    throw OutOfBounds("move " + std::string(1, action_letter(a)) + " from " + to_string(s) +
                      " leaves the grid");
  if (strict && world.is_obstacle(next)) throw ObstacleHit("obstacle at " + to_string(next));
  return next;
}

struct Successor {
  Action action;
  Cell cell;
};

inline std::vector<Successor> neighbors(const GridWorld& world, const Cell& s,
                                        ObstacleMode mode = ObstacleMode::Penalize) {
  std::vector<Successor> out;
  out.reserve(kActions.size());
  for (Action a : kActions) {
    const Cell next = step(s, a);
    if (!world.in_bounds(next)) continue;
    if (mode == ObstacleMode::Exclude && world.is_obstacle(next)) continue;
    out.push_back({a, next});
  }
  return out;
}

}  // namespace dpp

template <>
struct std::hash<dpp::Cell> {
  std::size_t operator()(const dpp::Cell& c) const noexcept {
    return std::hash<std::int64_t>{}((static_cast<std::int64_t>(c.x) << 32) ^
                                     static_cast<std::uint32_t>(c.y));
  }
};
