#pragma once

#include <algorithm>
#include <cmath>

#include "usvnav/env/flow.hpp"

namespace usvnav {

/// Terminal condition of the current state. Precedence when several hold:
/// collision, goal, out of bounds, timeout.
inline Outcome classify_termination(const EnvironmentState& env, const EnvConfig& cfg) {
  const Vec2 p = env.robot.position;
  for (const auto& obs : env.obstacles) {
    if (distance(p, obs.center) <= obs.radius + cfg.robot_radius) return Outcome::collision;
  }
  if (distance(p, env.goal) <= cfg.goal_radius) return Outcome::goal;
  if (env.enforce_boundary && !env.boundary.contains(p)) return Outcome::out_of_bounds;
  if (env.step_count >= cfg.max_steps) return Outcome::timeout;
  return Outcome::running;
}

struct StepResult {
  RobotState robot;
  Outcome outcome = Outcome::running;
  double elapsed = 0.0;  // simulated seconds until termination or dt
};

namespace detail {

/// Steering state at time t into a control step with constant (a, w).
inline RobotState steer_at(const RobotState& r0, Action act, double t, double v_max) {
  RobotState r = r0;
  r.heading = wrap_angle(r0.heading + act.turn_rate * t);
  r.steer_speed = std::clamp(r0.steer_speed + act.accel * t, 0.0, v_max);
  return r;
}

}  // namespace detail

/// Integrates dX/dt = V_C(X) + V_S(t) over one control step. Heading and
/// steering speed follow their closed forms; position is advanced with RK4 on
/// `cfg.substeps` fixed substeps (refined internally near fast vortex cores)
/// and termination is checked after each one.
/// The step counter of `env` is not touched.
inline StepResult step_dynamics(const EnvironmentState& env, Action action, double dt, const EnvConfig& cfg) {
  const RobotState initial = env.robot;
  const int n = std::max(cfg.substeps, 1);
  const double h = dt / n;

  auto velocity = [&](Vec2 x, double t) {
    return flow_at(env.vortices, x) + detail::steer_at(initial, action, t, cfg.v_max).steering_velocity();
  };

  // Fast vortex cores spin at up to v_edge / r0; each substep is split so
  // that one RK4 stage never turns more than kMaxStageTurn radians of it.
  constexpr double kMaxStageTurn = 0.05;
  double spin = 0.0;
  for (const auto& v : env.vortices) spin = std::max(spin, std::abs(v.core_angular_velocity()));
  const int pieces = std::max(1, static_cast<int>(std::ceil(h * spin / kMaxStageTurn)));
  const double hp = h / pieces;

  EnvironmentState probe = env;  // termination checks only look at robot + step_count
  Vec2 x = initial.position;
  StepResult result;
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < pieces; ++j) {
      const double t = k * h + j * hp;
      const Vec2 k1 = velocity(x, t);
      const Vec2 k2 = velocity(x + k1 * (hp / 2), t + hp / 2);
      const Vec2 k3 = velocity(x + k2 * (hp / 2), t + hp / 2);
      const Vec2 k4 = velocity(x + k3 * hp, t + hp);
      x += (k1 + 2.0 * k2 + 2.0 * k3 + k4) * (hp / 6.0);
    }

    const double t_next = (k + 1 == n) ? dt : (k + 1) * h;
    probe.robot = detail::steer_at(initial, action, t_next, cfg.v_max);
    probe.robot.position = x;
    result.robot = probe.robot;
    result.elapsed = t_next;
    // the step budget is judged once per control step, not per substep
    probe.step_count = 0;
    const Outcome o = classify_termination(probe, cfg);
    if (o != Outcome::running) {
      result.outcome = o;
      return result;
    }
  }
  return result;
}

/// Goal-distance-shaped reward: r_step + alpha (d_prev - d_next), plus the
/// collision penalty or goal bonus on those events.
inline double reward(double prev_goal_distance, double next_goal_distance, Outcome outcome, const RewardParams& p) {
  double r = p.step + p.progress_gain * (prev_goal_distance - next_goal_distance);
  if (outcome == Outcome::collision) r += p.collision;
  if (outcome == Outcome::goal) r += p.goal;
  return r;
}

inline double reward(const RobotState& prev, const RobotState& next, Vec2 goal, Outcome outcome,
                     const RewardParams& p) {
  return reward(distance(prev.position, goal), distance(next.position, goal), outcome, p);
}


/// Stateful episode wrapper around an EnvironmentState.
class Simulator {
 public:
  struct Step {
    double reward = 0.0;
    Outcome outcome = Outcome::running;
  };

  Simulator(EnvironmentState state, EnvConfig cfg, RewardParams rewards = {})
      : state_(std::move(state)), cfg_(cfg), rewards_(rewards) {}

  const EnvironmentState& state() const { return state_; }
  const EnvConfig& config() const { return cfg_; }
  const RewardParams& reward_params() const { return rewards_; }
  Outcome status() const { return classify_termination(state_, cfg_); }

  /// Applies one control action. Must not be called once the episode ended.
  Step step(Action action, double dt) {
    const RobotState prev = state_.robot;
    StepResult res = step_dynamics(state_, action, dt, cfg_);
    state_.robot = res.robot;
    ++state_.step_count;
    Step out;
    out.outcome = res.outcome != Outcome::running ? res.outcome : classify_termination(state_, cfg_);
    out.reward = reward(prev, state_.robot, state_.goal, out.outcome, rewards_);
    return out;
  }

 private:
  EnvironmentState state_;
  EnvConfig cfg_;
  RewardParams rewards_;
};

}  // namespace usvnav
