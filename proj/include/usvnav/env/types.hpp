#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "usvnav/core/vec2.hpp"

namespace usvnav {

/// Rankine vortex. Positive circulation spins counterclockwise.
struct Vortex {
  Vec2 center;
  double core_radius = 1.0;  // r0 (m)
  double circulation = 0.0;  // Gamma (m^2/s)

  /// Angular velocity of the rigidly rotating core, Gamma / (2 pi r0^2).
  double core_angular_velocity() const {
    return circulation / (2.0 * std::numbers::pi * core_radius * core_radius);
  }
  /// Tangential speed at the core edge, |Omega| r0.
  double edge_speed() const { return std::abs(core_angular_velocity()) * core_radius; }

  static Vortex from_edge_speed(Vec2 center, double core_radius, double edge_speed, bool counterclockwise) {
    const double gamma = 2.0 * std::numbers::pi * core_radius * edge_speed;
    return {center, core_radius, counterclockwise ? gamma : -gamma};
  }

  bool operator==(const Vortex&) const = default;
};

struct Obstacle {
  Vec2 center;
  double radius = 1.0;
  bool operator==(const Obstacle&) const = default;
};

/// Pose plus commanded (steering) speed. The steering velocity points along
/// the heading: V_S = steer_speed * (cos theta, sin theta).
struct RobotState {
  Vec2 position;
  double heading = 0.0;      // (-pi, pi]
  double steer_speed = 0.0;  // [0, v_max]

  Vec2 steering_velocity() const { return unit_from_angle(heading) * steer_speed; }
  bool operator==(const RobotState&) const = default;
};

/// One command of the discrete action grid.
struct Action {
  double accel = 0.0;      // m/s^2
  double turn_rate = 0.0;  // rad/s
  bool operator==(const Action&) const = default;
};

inline constexpr std::array<double, 3> kAccelLevels{-0.4, 0.0, 0.4};
inline constexpr std::array<double, 3> kTurnRateLevels{-0.52, 0.0, 0.52};
inline constexpr int kNumActions = 9;

/// Action index layout: index = 3 * accel_index + turn_index, with both
/// sub-indices ordered {negative, zero, positive}. Index 4 is (0, 0).
constexpr Action action_from_index(int index) {
  return {kAccelLevels[static_cast<std::size_t>(index / 3)], kTurnRateLevels[static_cast<std::size_t>(index % 3)]};
}

constexpr int action_index(int accel_index, int turn_index) { return 3 * accel_index + turn_index; }

/// Inverse of action_from_index; -1 if the pair is not on the grid.
inline int index_of_action(Action a) {
  for (int i = 0; i < kNumActions; ++i) {
    if (action_from_index(i) == a) return i;
  }
  return -1;
}

/// Axis-aligned square region [lo, hi] x [lo, hi].
struct Boundary {
  double lo = 0.0;
  double hi = 50.0;

  bool contains(Vec2 p) const { return p.x >= lo && p.x <= hi && p.y >= lo && p.y <= hi; }
  double size() const { return hi - lo; }
  bool operator==(const Boundary&) const = default;
};

enum class Outcome { running, goal, collision, out_of_bounds, timeout };

constexpr std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::running: return "running";
    case Outcome::goal: return "goal";
    case Outcome::collision: return "collision";
    case Outcome::out_of_bounds: return "out_of_bounds";
    case Outcome::timeout: return "timeout";
  }
  return "unknown";
}

struct RewardParams {
  double step = -1.0;
  double collision = -50.0;
  double goal = 100.0;
  double progress_gain = 1.0;  // alpha
  double discount = 0.99;      // gamma
};

/// Simulator constants that the original experiments leave open.
struct EnvConfig {
  double map_size = 50.0;
  double v_max = 2.0;
  double robot_radius = 0.5;
  double goal_radius = 2.0;
  double edge_speed_min = 5.0;
  double edge_speed_max = 10.0;
  double core_radius_min = 0.5;
  double core_radius_max = 0.5;
  double obstacle_radius_min = 1.0;
  double obstacle_radius_max = 3.0;
  double obstacle_clearance = 5.0;  // from start and goal, measured to the obstacle surface
  double vortex_clearance = 0.0;    // from start and goal to the vortex center
  int substeps = 10;
  int max_steps = 1000;
  int generation_attempts = 10000;
};

struct EnvironmentState {
  std::vector<Vortex> vortices;
  std::vector<Obstacle> obstacles;
  Boundary boundary;
  bool enforce_boundary = false;
  Vec2 start;
  Vec2 goal;
  RobotState robot;
  int step_count = 0;
  std::uint64_t seed = 0;
  int phase = 1;

  bool operator==(const EnvironmentState&) const = default;
};

}  // namespace usvnav
