#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "usvnav/core/random.hpp"
#include "usvnav/env/types.hpp"

namespace usvnav {

/// Entity counts and start-goal separation of one curriculum phase.
struct PhaseSpec {
  int vortices = 0;
  int obstacles = 0;
  double min_start_goal = 0.0;
};

inline PhaseSpec phase_spec(int phase) {
  switch (phase) {
    case 1: return {4, 6, 30.0};
    case 2: return {6, 8, 35.0};
    case 3: return {8, 10, 40.0};
    default: throw std::invalid_argument("curriculum phase must be 1, 2 or 3, got " + std::to_string(phase));
  }
}

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GenerationOptions {
  std::optional<Vec2> start;  // fixed start/goal skip the separation sampling
  std::optional<Vec2> goal;
  bool enforce_boundary = false;
  std::optional<PhaseSpec> counts;  // overrides phase_spec(phase)
};

/// Random environment for curriculum `phase`, fully determined by `seed`.
inline EnvironmentState generate_environment(int phase, std::uint64_t seed, const EnvConfig& cfg,
                                             const GenerationOptions& opts = {}) {
  const PhaseSpec spec = opts.counts.value_or(phase_spec(phase));
  Rng rng(seed);
  EnvironmentState env;
  env.seed = seed;
  env.phase = phase;
  env.boundary = {0.0, cfg.map_size};
  env.enforce_boundary = opts.enforce_boundary;

  auto random_point = [&] { return Vec2{rng.uniform(0.0, cfg.map_size), rng.uniform(0.0, cfg.map_size)}; };

  if (opts.start && opts.goal) {
    env.start = *opts.start;
    env.goal = *opts.goal;
  } else {
    bool placed = false;
    for (int attempt = 0; attempt < cfg.generation_attempts && !placed; ++attempt) {
      env.start = opts.start.value_or(random_point());
      env.goal = opts.goal.value_or(random_point());
      placed = distance(env.start, env.goal) >= spec.min_start_goal;
    }
    if (!placed) throw GenerationError("could not place start and goal at the required separation");
  }

  env.vortices.reserve(static_cast<std::size_t>(spec.vortices));
  int vortex_attempts = 0;
  while (static_cast<int>(env.vortices.size()) < spec.vortices) {
    if (++vortex_attempts > cfg.generation_attempts) throw GenerationError("could not place vortices clear of start and goal");
    const Vec2 c = random_point();
    if (distance(c, env.start) < cfg.vortex_clearance || distance(c, env.goal) < cfg.vortex_clearance) continue;
    const bool ccw = rng.bernoulli(0.5);
    const double r0 = rng.uniform(cfg.core_radius_min, cfg.core_radius_max);
    const double v_edge = rng.uniform(cfg.edge_speed_min, cfg.edge_speed_max);
    env.vortices.push_back(Vortex::from_edge_speed(c, r0, v_edge, ccw));
  }

  env.obstacles.reserve(static_cast<std::size_t>(spec.obstacles));
  int attempts = 0;
  while (static_cast<int>(env.obstacles.size()) < spec.obstacles) {
    if (++attempts > cfg.generation_attempts) throw GenerationError("could not place obstacles clear of start and goal");
    const Vec2 c = random_point();
    const double r = rng.uniform(cfg.obstacle_radius_min, cfg.obstacle_radius_max);
    if (distance(c, env.start) - r < cfg.obstacle_clearance) continue;
    if (distance(c, env.goal) - r < cfg.obstacle_clearance) continue;
    env.obstacles.push_back({c, r});
  }

  env.robot.position = env.start;
  env.robot.heading = std::numbers::pi - 2.0 * std::numbers::pi * rng.uniform01();
  env.robot.steer_speed = rng.uniform(0.0, cfg.v_max);
  return env;
}

}  // namespace usvnav
