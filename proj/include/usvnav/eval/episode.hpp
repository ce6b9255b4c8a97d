#pragma once

#include <chrono>
#include <exception>
#include <string>
#include <vector>

#include "usvnav/env/dynamics.hpp"
#include "usvnav/planners/planner.hpp"

namespace usvnav {

/// Vehicle state after a control step, with the command that produced it.
struct StepRecord {
  double time = 0.0;
  Vec2 position;
  double heading = 0.0;
  double speed = 0.0;  // steering speed
  Action action;
  double reward = 0.0;
  double phi = 1.0;
};

struct EpisodeRecord {
  std::uint64_t env_seed = 0;
  double dt = 0.0;
  RobotState initial;
  std::vector<StepRecord> steps;
  std::vector<double> plan_ms;  // wall clock of each planner call
  Outcome outcome = Outcome::running;
  std::string failure;  // planner exception message; such episodes end as timeouts

  int step_count() const { return static_cast<int>(steps.size()); }
  double duration() const { return step_count() * dt; }
  double total_reward() const {
    double s = 0.0;
    for (const auto& st : steps) s += st.reward;
    return s;
  }
};

/// Sum of normalized command magnitudes, |a|/0.4 + |w|/0.52 per step.
inline double energy(std::span<const StepRecord> steps) {
  double e = 0.0;
  for (const auto& s : steps) e += std::abs(s.action.accel) / kAccelLevels[2] + std::abs(s.action.turn_rate) / kTurnRateLevels[2];
  return e;
}
inline double energy(const EpisodeRecord& rec) { return energy(rec.steps); }

struct EpisodeSetup {
  EnvConfig env;
  SensorConfig sensor;
  RewardParams rewards;
  double dt = 0.5;
};

/// Observe -> plan -> step until the episode terminates.
inline EpisodeRecord run_episode(Planner& planner, const EnvironmentState& env, const EpisodeSetup& setup,
                                 std::uint64_t planner_seed) {
  Simulator sim(env, setup.env, setup.rewards);
  EpisodeRecord rec;
  rec.env_seed = env.seed;
  rec.dt = setup.dt;
  rec.initial = env.robot;
  rec.outcome = sim.status();
  planner.reset(planner_seed);
  rec.steps.reserve(static_cast<std::size_t>(setup.env.max_steps));

  while (rec.outcome == Outcome::running) {
    const Observation obs = observe(sim.state(), setup.sensor);
    Action act;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      act = planner.act(obs, sim.state().robot, setup.dt);
    } catch (const std::exception& e) {
      rec.failure = e.what();
      rec.outcome = Outcome::timeout;
      break;
    }
    const auto t1 = std::chrono::steady_clock::now();
    rec.plan_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());

    const Simulator::Step st = sim.step(act, setup.dt);
    const RobotState& r = sim.state().robot;
    rec.steps.push_back({sim.state().step_count * setup.dt, r.position, r.heading, r.steer_speed, act, st.reward,
                         planner.last_phi()});
    rec.outcome = st.outcome;
  }
  return rec;
}

}  // namespace usvnav
