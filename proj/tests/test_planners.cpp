#include <gtest/gtest.h>

#include <numbers>

#include "usvnav/env/generator.hpp"
#include "usvnav/eval/episode.hpp"
#include "usvnav/planners/apf.hpp"
#include "usvnav/planners/bug.hpp"
#include "usvnav/planners/registry.hpp"
#include "support/oracles.hpp"

using namespace usvnav;
using oracle::empty_world;
using oracle::numeric_potential_gradient_error;

namespace {

/// LiDAR view of a straight wall perpendicular to the robot's heading at
/// distance `d` ahead.
Observation wall_ahead(double d, Vec2 goal, const SensorConfig& s = {}) {
  Observation obs;
  obs.velocity = {1.0, 0.0};
  obs.goal = goal;
  obs.lidar.resize(static_cast<std::size_t>(s.beam_count));
  for (int i = 0; i < s.beam_count; ++i) {
    const double c = std::cos(s.beam_angle(i));
    obs.lidar[static_cast<std::size_t>(i)] = c > 0.0 ? std::min(s.range, d / c) : s.range;
  }
  return obs;
}

Observation clear_view(Vec2 velocity, Vec2 goal, const SensorConfig& s = {}) {
  Observation obs;
  obs.velocity = velocity;
  obs.goal = goal;
  obs.lidar.assign(static_cast<std::size_t>(s.beam_count), s.range);
  return obs;
}

}  // namespace

TEST(Apf, ZeroForceAtGoal) {
  const auto f = apf_force(clear_view({1, 0}, {0, 0}), SensorConfig{}, ApfParams{});
  EXPECT_EQ(f.norm(), 0.0);
}

TEST(Apf, AttractionTowardGoal) {
  const auto f = apf_force(clear_view({1, 0}, {4, 0}), SensorConfig{}, ApfParams{});
  EXPECT_NEAR(f.x, 200.0, 1e-12);
  EXPECT_NEAR(f.y, 0.0, 1e-12);
}

TEST(Apf, ForceIsNegativeGradient) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) ASSERT_LT(numeric_potential_gradient_error(rng), 1e-3) << "state " << i;
}

TEST(Apf, RepulsionVanishesAtInfluenceRange) {
  const ApfParams p;
  const Vec2 goal{30, 0};
  const std::vector<Vec2> none;
  const Vec2 base = apf_force({0, 0}, goal, none, p);
  for (double d : {10.0, 10.5, 20.0}) {
    const std::vector<Vec2> far{{0, d}};
    const Vec2 f = apf_force({0, 0}, goal, far, p);
    EXPECT_EQ(f, base);
  }
  double prev = std::numeric_limits<double>::infinity();
  for (double d : {9.9, 9.99, 9.999, 9.9999}) {
    const std::vector<Vec2> near{{0, d}};
    const double extra = (apf_force({0, 0}, goal, near, p) - base).norm();
    EXPECT_LT(extra, prev);
    prev = extra;
  }
  EXPECT_LT(prev, 1e-5 * base.norm());
}

TEST(Apf, ActionMapping) {
  const ApfParams p;
  const Observation obs = clear_view({1, 0}, {10, 0});
  // force aligned with travel: no turn
  EXPECT_EQ(apf_action_from_force({300, 0}, obs, p, 0.5).turn_rate, 0.0);
  // 0.3 rad to port at dt 0.5: rotations {-0.26, 0, 0.26}, nearest is 0.26
  EXPECT_EQ(apf_action_from_force(unit_from_angle(0.3) * 100.0, obs, p, 0.5).turn_rate, 0.52);
  EXPECT_EQ(nearest_turn_rate(0.3, 0.5), 0.52);
  EXPECT_EQ(nearest_turn_rate(-0.05, 0.5), 0.0);
  // projection 150 / m = 0.3 -> nearest 0.4
  EXPECT_EQ(apf_action_from_force({150, 0}, obs, p, 0.5).accel, 0.4);
  EXPECT_EQ(nearest_accel(0.3), 0.4);
  EXPECT_EQ(nearest_accel(-0.1), 0.0);
}

TEST(Apf, RestUsesHeading) {
  const Observation obs = clear_view({0, 0}, {0, 10});
  const Action a = apf_action(obs, SensorConfig{}, ApfParams{}, 1.0);
  EXPECT_EQ(a.turn_rate, 0.52);
  EXPECT_EQ(a.accel, 0.0);  // force is perpendicular to the heading
}

TEST(Bug, GoToGoalWhenClear) {
  BugPlanner ba;
  ba.reset(0);
  const Action a = ba.act(clear_view({1, 0}, {0, 20}), RobotState{{}, 0.0, 1.0}, 1.0);
  EXPECT_EQ(ba.mode(), BugMode::go_to_goal);
  EXPECT_EQ(a.turn_rate, 0.52);
  const Action b = ba.act(clear_view({1, 0}, {20, 0}), RobotState{{}, 0.0, 1.0}, 1.0);
  EXPECT_EQ(b.accel, 0.4);
  EXPECT_EQ(b.turn_rate, 0.0);
}

TEST(Bug, FollowsWallTangentAtStandoff) {
  BugPlanner ba;
  ba.reset(0);
  const Vec2 dir = ba.desired_direction(wall_ahead(5.0, {20, 3}));
  EXPECT_EQ(ba.mode(), BugMode::follow);
  EXPECT_NEAR(std::abs(dir.y), 1.0, 1e-9);  // parallel to the wall
  EXPECT_NEAR(dir.x, 0.0, 1e-9);
  EXPECT_GT(dir.y, 0.0);  // side chosen toward the goal
  EXPECT_NE(ba.side(), 0);
}

TEST(Bug, RecoversStandoffWhenTooClose) {
  BugPlanner ba;
  ba.reset(0);
  const Vec2 dir = ba.desired_direction(wall_ahead(4.0, {20, 3}));
  EXPECT_EQ(ba.mode(), BugMode::follow);
  EXPECT_LT(dir.x, 0.0);  // biased away from the wall
  EXPECT_GT(dir.y, 0.0);
}

TEST(Bug, SideLatchesForTheEpisode) {
  BugPlanner ba;
  ba.reset(0);
  ba.desired_direction(wall_ahead(5.0, {20, 3}));
  const int side = ba.side();
  // goal now lies on the other side; the following side must not switch
  const Vec2 dir = ba.desired_direction(wall_ahead(5.0, {20, -3}));
  EXPECT_EQ(ba.side(), side);
  EXPECT_GT(dir.y, 0.0);
  ba.reset(1);
  EXPECT_EQ(ba.side(), 0);
}

TEST(Bug, CorridorTest) {
  const std::vector<Vec2> off{{5, 6}};
  EXPECT_TRUE(goal_path_clear(off, {20, 0}, 5.0, 10.0));
  const std::vector<Vec2> on{{5, 4}};
  EXPECT_FALSE(goal_path_clear(on, {20, 0}, 5.0, 10.0));
  const std::vector<Vec2> beyond_goal{{8, 0}};
  EXPECT_TRUE(goal_path_clear(beyond_goal, {6, 0}, 5.0, 10.0));
  const std::vector<Vec2> behind{{-3, 0}};
  EXPECT_TRUE(goal_path_clear(behind, {20, 0}, 5.0, 10.0));
}

TEST(Bug, PrincipalDirection) {
  const std::vector<Vec2> line{{1, 1}, {2, 2}, {3, 3}, {4, 4}};
  const Vec2 d = principal_direction(line);
  EXPECT_NEAR(std::abs(dot(d, Vec2{1, 1} / std::sqrt(2.0))), 1.0, 1e-12);
}

TEST(Planners, PureFunctionsOfInput) {
  Rng rng(2);
  const SensorConfig s;
  EnvConfig cfg;
  for (int i = 0; i < 50; ++i) {
    const auto env = generate_environment(3, rng.next_u64(), cfg);
    const auto obs = observe(env, s);
    ApfPlanner a1, a2;
    BugPlanner b1, b2;
    b1.reset(0);
    b2.reset(0);
    const Action x = a1.act(obs, env.robot, 0.5), y = a2.act(obs, env.robot, 0.5);
    EXPECT_EQ(index_of_action(x), index_of_action(y));
    EXPECT_EQ(index_of_action(b1.act(obs, env.robot, 0.5)), index_of_action(b2.act(obs, env.robot, 0.5)));
  }
}

TEST(Planners, ReachGoalInEmptyWater) {
  Rng rng(3);
  EpisodeSetup setup;
  int apf = 0, ba = 0;
  for (int i = 0; i < 100; ++i) {
    const auto env = empty_world(rng);
    ApfPlanner p1;
    BugPlanner p2;
    apf += run_episode(p1, env, setup, 0).outcome == Outcome::goal;
    ba += run_episode(p2, env, setup, 0).outcome == Outcome::goal;
  }
  EXPECT_EQ(apf, 100);
  EXPECT_EQ(ba, 100);
}

TEST(Registry, ParsesSpecs) {
  EXPECT_EQ(parse_planner_spec("apf").kind, "apf");
  EXPECT_EQ(parse_planner_spec("ba").kind, "ba");
  EXPECT_EQ(parse_planner_spec("iqn:0.25").phi, 0.25);
  EXPECT_FALSE(parse_planner_spec("iqn:adaptive").phi.has_value());
  EXPECT_EQ(parse_planner_spec("iqn:0.25").label(), "iqn:0.25");
  EXPECT_THROW(parse_planner_spec("iqn:0"), std::invalid_argument);
  EXPECT_THROW(parse_planner_spec("iqn:1.5"), std::invalid_argument);
  EXPECT_THROW(parse_planner_spec("rrt"), std::invalid_argument);
  EXPECT_THROW(make_planner_factory(parse_planner_spec("dqn"), std::nullopt, SensorConfig{}, 2.0, 32),
               std::invalid_argument);
  nn::Checkpoint ck{nn::AgentKind::dqn, 1, 0, {}, nn::Model<float>::create(nn::AgentKind::dqn, nn::Topology{}, 1)};
  EXPECT_THROW(make_planner_factory(parse_planner_spec("iqn:0.5"), ck, SensorConfig{}, 2.0, 32), std::invalid_argument);
  EXPECT_EQ(make_planner_factory(parse_planner_spec("dqn"), ck, SensorConfig{}, 2.0, 32)()->name(), "dqn");
}

TEST(Registry, FixedAndAdaptivePhi) {
  nn::Checkpoint ck{nn::AgentKind::iqn, 1, 0, {}, nn::Model<float>::create(nn::AgentKind::iqn, nn::Topology{}, 1)};
  auto fixed = make_planner_factory(parse_planner_spec("iqn:0.25"), ck, SensorConfig{}, 2.0, 32)();
  auto adaptive = make_planner_factory(parse_planner_spec("iqn:adaptive"), ck, SensorConfig{}, 2.0, 32)();
  Observation obs = clear_view({1, 0}, {10, 0});
  obs.lidar[3] = 4.0;
  fixed->reset(0);
  adaptive->reset(0);
  fixed->act(obs, RobotState{}, 0.5);
  adaptive->act(obs, RobotState{}, 0.5);
  EXPECT_EQ(fixed->last_phi(), 0.25);
  EXPECT_DOUBLE_EQ(adaptive->last_phi(), 0.4);
  obs.lidar[3] = 10.0;
  adaptive->act(obs, RobotState{}, 0.5);
  EXPECT_EQ(adaptive->last_phi(), 1.0);
}
