#pragma once

#include <algorithm>
#include <vector>

#include "usvnav/planners/planner.hpp"

namespace usvnav {

struct BugParams {
  double standoff = 5.0;
  double follow_speed_fraction = 0.4;  // of v_max
  double v_max = 2.0;
  int tangent_points = 7;
  double standoff_gain = 1.0;
};

enum class BugMode { go_to_goal, follow };

/// True when no reflection lies in the corridor of half-width `half_width`
/// ahead of the robot along the goal direction, truncated at `max_range` (or
/// at the goal if it is nearer).
inline bool goal_path_clear(std::span<const Vec2> points, Vec2 goal, double half_width, double max_range) {
  const double dg = goal.norm();
  if (dg == 0.0) return true;
  const Vec2 g = goal / dg;
  const double len = std::min(dg, max_range);
  for (const Vec2 p : points) {
    const double along = dot(p, g);
    if (along <= 0.0 || along > len) continue;
    if (std::abs(cross(g, p)) < half_width) return false;
  }
  return true;
}

/// Unit principal direction of a point set (sign arbitrary).
inline Vec2 principal_direction(std::span<const Vec2> points) {
  Vec2 mean;
  for (const Vec2 p : points) mean += p;
  mean = mean / static_cast<double>(points.size());
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (const Vec2 p : points) {
    const Vec2 d = p - mean;
    sxx += d.x * d.x;
    syy += d.y * d.y;
    sxy += d.x * d.y;
  }
  return unit_from_angle(0.5 * std::atan2(2.0 * sxy, sxx - syy));
}

/// VisBug-style reactive planner: heads straight for the goal while the way
/// is clear, otherwise follows the nearest obstacle surface at the standoff
/// distance. The following side is latched at the first contact.
class BugPlanner final : public Planner {
 public:
  explicit BugPlanner(SensorConfig sensor = {}, BugParams params = {}) : sensor_(sensor), params_(params) {}

  void reset(std::uint64_t) override {
    mode_ = BugMode::go_to_goal;
    side_ = 0;
  }

  BugMode mode() const { return mode_; }
  /// +1 keeps the obstacle to port, -1 to starboard, 0 before first contact.
  int side() const { return side_; }

  /// Heading the planner wants to travel along (robot frame, unit length).
  Vec2 desired_direction(const Observation& obs) {
    const auto pts = reflection_points(obs, sensor_);
    if (pts.empty() || goal_path_clear(pts, obs.goal, params_.standoff, sensor_.range)) {
      mode_ = BugMode::go_to_goal;
      const double dg = obs.goal.norm();
      return dg > 0.0 ? obs.goal / dg : Vec2{1.0, 0.0};
    }
    mode_ = BugMode::follow;

    std::vector<Vec2> nearest(pts.begin(), pts.end());
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(params_.tangent_points), nearest.size());
    std::partial_sort(nearest.begin(), nearest.begin() + static_cast<std::ptrdiff_t>(k), nearest.end(),
                      [](Vec2 a, Vec2 b) { return a.squared_norm() < b.squared_norm(); });
    nearest.resize(k);
    const Vec2 closest = nearest.front();
    const double d_near = closest.norm();
    const Vec2 away = closest / -d_near;

    Vec2 tangent = k >= 2 ? principal_direction(nearest) : Vec2{-away.y, away.x};
    if (side_ == 0) {
      if (dot(tangent, obs.goal) < 0.0) tangent = -tangent;
      side_ = cross(tangent, closest) >= 0.0 ? 1 : -1;
    } else if ((cross(tangent, closest) >= 0.0 ? 1 : -1) != side_) {
      tangent = -tangent;
    }

    const Vec2 desired = tangent + (params_.standoff_gain * (params_.standoff - d_near) / params_.standoff) * away;
    const double len = desired.norm();
    return len > 0.0 ? desired / len : tangent;
  }

  Action act(const Observation& obs, const RobotState& robot, double dt) override {
    const Vec2 desired = desired_direction(obs);
    const Vec2 dir = travel_direction(obs);
    const double diff = wrap_angle(desired.angle() - dir.angle());
    const double slow = params_.follow_speed_fraction * params_.v_max;
    double target = params_.v_max;
    // slow down while following, and while turning around toward the goal
    if (mode_ == BugMode::follow || std::abs(diff) > std::numbers::pi / 2) target = slow;
    return {nearest_accel((target - robot.steer_speed) / dt), nearest_turn_rate(diff, dt)};
  }

  std::string name() const override { return "ba"; }

 private:
  SensorConfig sensor_;
  BugParams params_;
  BugMode mode_ = BugMode::go_to_goal;
  int side_ = 0;
};

}  // namespace usvnav
