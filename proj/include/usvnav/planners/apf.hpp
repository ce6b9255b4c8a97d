#pragma once

#include <span>
#include <vector>

#include "usvnav/planners/planner.hpp"

namespace usvnav {

struct ApfParams {
  double k_att = 50.0;
  double k_rep = 500.0;
  double goal_exponent = 2.0;  // n
  double mass = 500.0;         // m
  double influence = 10.0;     // d0
};

/// U_att + sum of U_rep over `points`; the repulsive term of each point is
/// 0.5 k_rep (1/d - 1/d0)^2 d_goal^n inside the influence range, else 0.
inline double apf_potential(Vec2 x, Vec2 goal, std::span<const Vec2> points, const ApfParams& p) {
  const double dg = distance(x, goal);
  double u = 0.5 * p.k_att * dg * dg;
  const double dgn = std::pow(dg, p.goal_exponent);
  for (const Vec2 o : points) {
    const double d = distance(x, o);
    if (d > p.influence) continue;
    const double s = 1.0 / d - 1.0 / p.influence;
    u += 0.5 * p.k_rep * s * s * dgn;
  }
  return u;
}

/// Analytic -grad(U_att + U_rep) at `x`.
inline Vec2 apf_force(Vec2 x, Vec2 goal, std::span<const Vec2> points, const ApfParams& p) {
  const Vec2 to_goal = x - goal;
  const double dg = to_goal.norm();
  Vec2 grad = p.k_att * to_goal;
  const double n = p.goal_exponent;
  const double dgn = std::pow(dg, n);
  // d/dx d_goal^n = n d_goal^(n-2) (x - goal); finite at the goal for n >= 2
  const Vec2 grad_dgn = dg > 0.0 ? (n * std::pow(dg, n - 2.0)) * to_goal : Vec2{};
  for (const Vec2 o : points) {
    const Vec2 from_obs = x - o;
    const double d = from_obs.norm();
    if (d > p.influence || d <= 0.0) continue;
    const double s = 1.0 / d - 1.0 / p.influence;
    grad += (-p.k_rep * s * dgn / (d * d * d)) * from_obs;
    grad += (0.5 * p.k_rep * s * s) * grad_dgn;
  }
  return -grad;
}

/// Force on the robot (origin of the robot frame) from an observation: each
/// LiDAR reflection is an obstacle point.
inline Vec2 apf_force(const Observation& obs, const SensorConfig& sensor, const ApfParams& p) {
  const auto pts = reflection_points(obs, sensor);
  return apf_force(Vec2{}, obs.goal, pts, p);
}

/// Maps a force to the grid: turn toward the force direction, accelerate by
/// the force component along the direction of travel scaled by 1/m.
inline Action apf_action_from_force(Vec2 force, const Observation& obs, const ApfParams& p, double dt) {
  const Vec2 dir = travel_direction(obs);
  Action act;
  if (force.squared_norm() > 0.0) act.turn_rate = nearest_turn_rate(wrap_angle(force.angle() - dir.angle()), dt);
  act.accel = nearest_accel(dot(force, dir) / p.mass);
  return act;
}

inline Action apf_action(const Observation& obs, const SensorConfig& sensor, const ApfParams& p, double dt) {
  return apf_action_from_force(apf_force(obs, sensor, p), obs, p, dt);
}

class ApfPlanner final : public Planner {
 public:
  explicit ApfPlanner(SensorConfig sensor = {}, ApfParams params = {}) : sensor_(sensor), params_(params) {
    params_.influence = sensor_.range;
  }

  Action act(const Observation& obs, const RobotState&, double dt) override {
    return apf_action(obs, sensor_, params_, dt);
  }
  std::string name() const override { return "apf"; }

 private:
  SensorConfig sensor_;
  ApfParams params_;
};

}  // namespace usvnav
