#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <string>

#include "usvnav/sensing/observation.hpp"

namespace usvnav {

/// Local planner: maps the current observation (and the vehicle's own
/// steering state) to one discrete action per control step.
class Planner {
 public:
  virtual ~Planner() = default;

  /// Called at the start of every episode; `seed` drives any sampling.
  virtual void reset(std::uint64_t seed) { (void)seed; }
  virtual Action act(const Observation& obs, const RobotState& robot, double dt) = 0;
  /// CVaR threshold used by the last decision (1.0 for risk-neutral planners).
  virtual double last_phi() const { return 1.0; }
  virtual std::string name() const = 0;
};

/// Creates one independent planner instance per episode.
using PlannerFactory = std::function<std::unique_ptr<Planner>()>;

/// Turn rate from the grid whose rotation over `dt` lands closest to `angle_diff`.
inline double nearest_turn_rate(double angle_diff, double dt) {
  double best = kTurnRateLevels[0];
  double best_err = std::numeric_limits<double>::infinity();
  for (double w : kTurnRateLevels) {
    const double err = std::abs(angle_diff - w * dt);
    if (err < best_err) {
      best_err = err;
      best = w;
    }
  }
  return best;
}

/// Acceleration level closest to `value` (m/s^2).
inline double nearest_accel(double value) {
  double best = kAccelLevels[0];
  double best_err = std::numeric_limits<double>::infinity();
  for (double a : kAccelLevels) {
    const double err = std::abs(value - a);
    if (err < best_err) {
      best_err = err;
      best = a;
    }
  }
  return best;
}

/// Direction of travel in the robot frame; falls back to the heading when the
/// vehicle is (nearly) at rest.
inline Vec2 travel_direction(const Observation& obs) {
  const double speed = obs.velocity.norm();
  if (speed < 1e-3) return {1.0, 0.0};
  return obs.velocity / speed;
}

}  // namespace usvnav
