#include <gtest/gtest.h>

#include <numbers>

#include "support/oracles.hpp"
#include "usvnav/env/dynamics.hpp"
#include "usvnav/env/generator.hpp"
#include "usvnav/env/snapshot.hpp"

using namespace usvnav;
using usvnav::oracle::rankine_speed_oracle;

namespace {

EnvironmentState open_water(Vec2 pos, double heading, double speed) {
  EnvironmentState env;
  env.start = pos;
  env.goal = {1000.0, 1000.0};
  env.robot = {pos, heading, speed};
  return env;
}

}  // namespace

TEST(Rankine, ZeroAtCentre) {
  const auto v = Vortex::from_edge_speed({3, 4}, 2.0, 5.0, true);
  const Vec2 u = rankine_velocity(v, {3, 4});
  EXPECT_EQ(u.x, 0.0);
  EXPECT_EQ(u.y, 0.0);
}

TEST(Rankine, EdgeSpeedAtCoreRadius) {
  const auto v = Vortex::from_edge_speed({0, 0}, 2.0, 5.0, true);
  EXPECT_NEAR(rankine_velocity(v, {2, 0}).norm(), 5.0, 1e-12);
  EXPECT_NEAR(v.edge_speed(), 5.0, 1e-12);
}

TEST(Rankine, OuterBranch) {
  const auto v = Vortex::from_edge_speed({0, 0}, 2.0, 5.0, false);
  EXPECT_NEAR(rankine_velocity(v, {0, 4}).norm(), 2.5, 1e-12);
  EXPECT_NEAR(rankine_velocity(v, {0, 4}).norm(), rankine_speed_oracle(5.0, 2.0, 4.0), 1e-12);
}

TEST(Rankine, TangentialAndSpinDirection) {
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const bool ccw = rng.bernoulli(0.5);
    const auto v = Vortex::from_edge_speed({rng.uniform(0, 50), rng.uniform(0, 50)}, rng.uniform(0.5, 8),
                                           rng.uniform(5, 10), ccw);
    const Vec2 p{rng.uniform(0, 50), rng.uniform(0, 50)};
    const Vec2 r = p - v.center, u = rankine_velocity(v, p);
    EXPECT_NEAR(dot(r, u), 0.0, 1e-9 * r.norm() * std::max(1.0, u.norm()));
    EXPECT_EQ(cross(r, u) > 0.0, ccw);
    EXPECT_EQ(v.circulation > 0.0, ccw);
    EXPECT_NEAR(u.norm(), rankine_speed_oracle(v.edge_speed(), v.core_radius, r.norm()), 1e-9);
  }
}

TEST(Rankine, ContinuousAtCoreRadius) {
  const auto v = Vortex::from_edge_speed({0, 0}, 3.7, 7.3, true);
  const double inside = rankine_velocity(v, {3.7 * (1 - 1e-12), 0}).norm();
  const double outside = rankine_velocity(v, {3.7 * (1 + 1e-12), 0}).norm();
  EXPECT_NEAR(inside, outside, 1e-9);
}

TEST(Rankine, MaximumAtCoreRadius) {
  const auto v = Vortex::from_edge_speed({0, 0}, 4.0, 6.0, true);
  const int n = 10000;
  double best = -1.0, best_r = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double r = 20.0 * i / n;
    const double s = rankine_velocity(v, {r, 0}).norm();
    if (s > best) best = s, best_r = r;
  }
  EXPECT_NEAR(best_r, 4.0, 20.0 / n);
}

TEST(Flow, EmptyAndSingle) {
  EnvironmentState env;
  EXPECT_EQ(flow_at(env, {7, 7}), Vec2{});
  env.vortices.push_back(Vortex::from_edge_speed({10, 10}, 3, 6, true));
  const Vec2 p{13, 9};
  EXPECT_EQ(flow_at(env, p), rankine_velocity(env.vortices[0], p));
}

TEST(Flow, MirrorPairAtMidpoint) {
  // Brute force over both analytic terms: co-rotating mirror images cancel at
  // the midpoint, counter-rotating ones add up.
  const auto left_ccw = Vortex::from_edge_speed({-3, 0}, 2, 5, true);
  const auto right_ccw = Vortex::from_edge_speed({3, 0}, 2, 5, true);
  const auto right_cw = Vortex::from_edge_speed({3, 0}, 2, 5, false);
  const std::vector<Vortex> same{left_ccw, right_ccw}, opposite{left_ccw, right_cw};
  EXPECT_NEAR(flow_at(same, {0, 0}).norm(), 0.0, 1e-12);
  const Vec2 single = rankine_velocity(left_ccw, {0, 0});
  EXPECT_NEAR(flow_at(opposite, {0, 0}).y, 2.0 * single.y, 1e-12);
  EXPECT_NEAR(flow_at(opposite, {0, 0}).x, 0.0, 1e-12);
}

TEST(Flow, SuperpositionIsLinear) {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Vortex> a, b;
    for (int i = 0; i < 4; ++i) {
      a.push_back(Vortex::from_edge_speed({rng.uniform(0, 50), rng.uniform(0, 50)}, rng.uniform(1, 8), rng.uniform(5, 10),
                                          rng.bernoulli(0.5)));
      b.push_back(Vortex::from_edge_speed({rng.uniform(0, 50), rng.uniform(0, 50)}, rng.uniform(1, 8), rng.uniform(5, 10),
                                          rng.bernoulli(0.5)));
    }
    std::vector<Vortex> both = a;
    both.insert(both.end(), b.begin(), b.end());
    const Vec2 p{rng.uniform(0, 50), rng.uniform(0, 50)};
    const Vec2 sum = flow_at(a, p) + flow_at(b, p), joint = flow_at(both, p);
    EXPECT_NEAR(joint.x, sum.x, 1e-12);
    EXPECT_NEAR(joint.y, sum.y, 1e-12);
  }
}

TEST(Dynamics, StraightLineWithoutCurrent) {
  const EnvConfig cfg;
  const auto env = open_water({10, 10}, 0.7, 1.3);
  const auto res = step_dynamics(env, {0.0, 0.0}, 2.0, cfg);
  EXPECT_NEAR(res.robot.position.x, 10 + 2.6 * std::cos(0.7), 1e-12);
  EXPECT_NEAR(res.robot.position.y, 10 + 2.6 * std::sin(0.7), 1e-12);
  EXPECT_EQ(res.outcome, Outcome::running);
}

TEST(Dynamics, HeadingIntegral) {
  const auto res = step_dynamics(open_water({10, 10}, 0.1, 1.0), {0.0, 0.52}, 1.0, EnvConfig{});
  EXPECT_NEAR(res.robot.heading, 0.62, 1e-12);
}

TEST(Dynamics, SpeedClipsAtMax) {
  const auto res = step_dynamics(open_water({10, 10}, 0.0, 1.8), {0.4, 0.0}, 1.0, EnvConfig{});
  EXPECT_DOUBLE_EQ(res.robot.steer_speed, 2.0);
}

TEST(Dynamics, ArcMatchesClosedForm) {
  // constant speed and turn rate in still water traces a circular arc
  const double v = 1.5, w = 0.52, dt = 1.0;
  const auto res = step_dynamics(open_water({0, 0}, 0.0, v), {0.0, w}, dt, EnvConfig{});
  EXPECT_NEAR(res.robot.position.x, v / w * std::sin(w * dt), 1e-7);
  EXPECT_NEAR(res.robot.position.y, v / w * (1 - std::cos(w * dt)), 1e-7);
}

TEST(Dynamics, SpeedStaysInRangeProperty) {
  EnvConfig cfg;
  Rng rng(3);
  for (int ep = 0; ep < 20; ++ep) {
    auto env = generate_environment(1 + static_cast<int>(rng.below(3)), rng.next_u64(), cfg);
    for (int t = 0; t < 60; ++t) {
      const auto res = step_dynamics(env, action_from_index(static_cast<int>(rng.below(9))), 1.0, cfg);
      ASSERT_GE(res.robot.steer_speed, 0.0);
      ASSERT_LE(res.robot.steer_speed, cfg.v_max);
      ASSERT_GT(res.robot.heading, -std::numbers::pi);
      ASSERT_LE(res.robot.heading, std::numbers::pi);
      env.robot = res.robot;
      if (res.outcome != Outcome::running) break;
    }
  }
}

TEST(Dynamics, SubstepHalvingConverges) {
  EnvConfig coarse, fine;
  fine.substeps = 2 * coarse.substeps;
  Rng rng(21);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    auto env = generate_environment(3, rng.next_u64(), coarse);
    env.obstacles.clear();
    env.goal = {1e3, 1e3};
    const Action a = action_from_index(static_cast<int>(rng.below(9)));
    const auto c = step_dynamics(env, a, 0.5, coarse), f = step_dynamics(env, a, 0.5, fine);
    worst = std::max(worst, distance(c.robot.position, f.robot.position));
  }
  EXPECT_LT(worst, 1e-3);
}

TEST(Dynamics, SubstepTerminationStopsEarly) {
  EnvConfig cfg;
  auto env = open_water({10, 10}, 0.0, 2.0);
  env.obstacles.push_back({{12.2, 10}, 1.0});
  const auto res = step_dynamics(env, {0.0, 0.0}, 1.0, cfg);
  EXPECT_EQ(res.outcome, Outcome::collision);
  EXPECT_LT(res.elapsed, 1.0);
  EXPECT_LT(res.robot.position.x, 11.0);
}

TEST(Reward, HandValues) {
  const RewardParams p;
  EXPECT_DOUBLE_EQ(reward(10.0, 9.0, Outcome::running, p), 0.0);
  EXPECT_DOUBLE_EQ(reward(7.0, 7.0, Outcome::collision, p), -51.0);
  EXPECT_DOUBLE_EQ(reward(5.0, 4.0, Outcome::goal, p), 100.0);
}

TEST(Reward, ProgressTelescopes) {
  EnvConfig cfg;
  auto env = generate_environment(1, 99, cfg);
  env.obstacles.clear();
  Simulator sim(env, cfg);
  const double d0 = distance(env.robot.position, env.goal);
  double progress = 0.0;
  Rng rng(1);
  for (int t = 0; t < 200 && sim.status() == Outcome::running; ++t) {
    const auto s = sim.step(action_from_index(static_cast<int>(rng.below(9))), 1.0);
    progress += s.reward - RewardParams{}.step - (s.outcome == Outcome::goal ? RewardParams{}.goal : 0.0);
  }
  EXPECT_NEAR(progress, d0 - distance(sim.state().robot.position, env.goal), 1e-9);
}

TEST(Termination, Cases) {
  EnvConfig cfg;
  auto env = open_water({20, 20}, 0.0, 0.0);
  env.goal = {20, 20};
  EXPECT_EQ(classify_termination(env, cfg), Outcome::goal);
  env.goal = {40, 40};
  env.obstacles.push_back({{21, 20}, 2.0});
  EXPECT_EQ(classify_termination(env, cfg), Outcome::collision);
  env.obstacles.clear();
  env.step_count = 1001;
  EXPECT_EQ(classify_termination(env, cfg), Outcome::timeout);
  env.step_count = 999;
  EXPECT_EQ(classify_termination(env, cfg), Outcome::running);
  env.robot.position = {-1, 20};
  EXPECT_EQ(classify_termination(env, cfg), Outcome::running);
  env.enforce_boundary = true;
  EXPECT_EQ(classify_termination(env, cfg), Outcome::out_of_bounds);
}

TEST(Termination, CollisionTakesPrecedenceOverGoal) {
  EnvConfig cfg;
  auto env = open_water({20, 20}, 0.0, 0.0);
  env.goal = {20, 20};
  env.obstacles.push_back({{20.5, 20}, 1.0});
  EXPECT_EQ(classify_termination(env, cfg), Outcome::collision);
}

TEST(Simulator, TimeoutAfterBudget) {
  EnvConfig cfg;
  cfg.max_steps = 5;
  Simulator sim(open_water({20, 20}, 0.0, 0.0), cfg);
  Outcome o = Outcome::running;
  int steps = 0;
  while (o == Outcome::running) o = sim.step({0, 0}, 1.0).outcome, ++steps;
  EXPECT_EQ(o, Outcome::timeout);
  EXPECT_EQ(steps, 5);
}

TEST(Actions, IndexMappingRoundTrip) {
  for (int i = 0; i < kNumActions; ++i) EXPECT_EQ(index_of_action(action_from_index(i)), i);
  EXPECT_EQ(action_from_index(0).accel, -0.4);
  EXPECT_EQ(action_from_index(0).turn_rate, -0.52);
  EXPECT_EQ(action_from_index(4).accel, 0.0);
  EXPECT_EQ(action_from_index(4).turn_rate, 0.0);
  EXPECT_EQ(action_from_index(8).accel, 0.4);
  EXPECT_EQ(action_from_index(8).turn_rate, 0.52);
}

TEST(Generator, PhaseCountsAndSeparation) {
  EnvConfig cfg;
  for (int phase = 1; phase <= 3; ++phase) {
    const auto spec = phase_spec(phase);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto env = generate_environment(phase, seed, cfg);
      ASSERT_EQ(static_cast<int>(env.vortices.size()), spec.vortices);
      ASSERT_EQ(static_cast<int>(env.obstacles.size()), spec.obstacles);
      ASSERT_GE(distance(env.start, env.goal), spec.min_start_goal);
      ASSERT_TRUE(env.boundary.contains(env.start));
      ASSERT_TRUE(env.boundary.contains(env.goal));
      for (const auto& v : env.vortices) {
        ASSERT_GE(v.edge_speed(), cfg.edge_speed_min - 1e-9);
        ASSERT_LE(v.edge_speed(), cfg.edge_speed_max + 1e-9);
        ASSERT_NEAR(std::abs(v.circulation), 2 * std::numbers::pi * v.core_radius * v.edge_speed(), 1e-9);
      }
      for (const auto& o : env.obstacles) {
        ASSERT_GE(o.radius, 1.0);
        ASSERT_LE(o.radius, 3.0);
        ASSERT_GE(distance(o.center, env.start) - o.radius, cfg.obstacle_clearance);
        ASSERT_GE(distance(o.center, env.goal) - o.radius, cfg.obstacle_clearance);
      }
      ASSERT_GE(env.robot.steer_speed, 0.0);
      ASSERT_LE(env.robot.steer_speed, cfg.v_max);
      ASSERT_EQ(env.robot.position, env.start);
    }
  }
  EXPECT_EQ(phase_spec(1).vortices, 4);
  EXPECT_EQ(phase_spec(1).obstacles, 6);
  EXPECT_EQ(phase_spec(1).min_start_goal, 30.0);
  EXPECT_EQ(phase_spec(3).vortices, 8);
  EXPECT_EQ(phase_spec(3).obstacles, 10);
  EXPECT_EQ(phase_spec(3).min_start_goal, 40.0);
  EXPECT_THROW(phase_spec(4), std::invalid_argument);
}

TEST(Generator, Deterministic) {
  EnvConfig cfg;
  EXPECT_EQ(generate_environment(2, 1234, cfg), generate_environment(2, 1234, cfg));
  EXPECT_FALSE(generate_environment(2, 1234, cfg) == generate_environment(2, 1235, cfg));
}

TEST(Generator, ImpossibleConstraintsThrow) {
  EnvConfig cfg;
  cfg.generation_attempts = 50;
  cfg.obstacle_clearance = 100.0;
  EXPECT_THROW(generate_environment(1, 1, cfg), GenerationError);
}

TEST(Snapshot, RoundTripIsExact) {
  EnvConfig cfg;
  cfg.goal_radius = 1.7;
  auto env = generate_environment(3, 42, cfg);
  env.step_count = 17;
  const auto back = snapshot_from_json(nlohmann::json::parse(snapshot_to_json(env, cfg).dump()));
  EXPECT_EQ(back.env, env);
  EXPECT_EQ(back.config.goal_radius, 1.7);
}

TEST(Snapshot, RejectsForeignDocument) {
  EXPECT_THROW(snapshot_from_json(nlohmann::json{{"format", "other"}}), std::invalid_argument);
  auto j = env_config_to_json(EnvConfig{});
  j["warp_drive"] = 1;
  EXPECT_THROW(env_config_from_json(j), std::invalid_argument);
}
