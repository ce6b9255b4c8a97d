#include <gtest/gtest.h>

#include <sstream>

#include "usvnav/config/run_config.hpp"
#include "usvnav/eval/csv.hpp"
#include "usvnav/eval/render.hpp"
#include "usvnav/planners/apf.hpp"
#include "usvnav/planners/bug.hpp"

using namespace usvnav;

namespace {

class ConstantPlanner final : public Planner {
 public:
  explicit ConstantPlanner(Action a) : a_(a) {}
  Action act(const Observation&, const RobotState&, double) override { return a_; }
  std::string name() const override { return "constant"; }

 private:
  Action a_;
};

class ThrowingPlanner final : public Planner {
 public:
  Action act(const Observation&, const RobotState&, double) override { throw std::runtime_error("boom"); }
  std::string name() const override { return "throwing"; }
};

EpisodeRecord record_with(Outcome o, int steps, double dt, Action a = {}) {
  EpisodeRecord r;
  r.dt = dt;
  r.outcome = o;
  for (int i = 0; i < steps; ++i) r.steps.push_back({(i + 1) * dt, {}, 0.0, 0.0, a, -1.0, 1.0});
  r.plan_ms.assign(static_cast<std::size_t>(steps), 0.1);
  return r;
}

}  // namespace

TEST(Episode, StartInsideGoalEndsImmediately) {
  EnvironmentState env;
  env.start = env.goal = {20, 20};
  env.robot.position = {21, 20};
  ApfPlanner p;
  const auto rec = run_episode(p, env, EpisodeSetup{}, 0);
  EXPECT_EQ(rec.outcome, Outcome::goal);
  EXPECT_EQ(rec.step_count(), 0);
}

TEST(Episode, IdleRobotTimesOut) {
  EnvironmentState env;
  env.start = env.robot.position = {10, 10};
  env.goal = {40, 40};
  ConstantPlanner p({0, 0});
  const auto rec = run_episode(p, env, EpisodeSetup{}, 0);
  EXPECT_EQ(rec.outcome, Outcome::timeout);
  EXPECT_EQ(rec.step_count(), 1000);
  EXPECT_DOUBLE_EQ(rec.duration(), 500.0);
  EXPECT_EQ(energy(rec), 0.0);
}

TEST(Episode, PlannerFailureIsRecorded) {
  EnvironmentState env;
  env.goal = {40, 40};
  ThrowingPlanner p;
  const auto rec = run_episode(p, env, EpisodeSetup{}, 0);
  EXPECT_EQ(rec.outcome, Outcome::timeout);
  EXPECT_EQ(rec.failure, "boom");
}

TEST(Episode, DeterministicAndTimed) {
  const auto env = suite_environment(2, 77, 3, EnvConfig{});
  BugPlanner a, b;
  const auto r1 = run_episode(a, env, EpisodeSetup{}, 1), r2 = run_episode(b, env, EpisodeSetup{}, 1);
  ASSERT_EQ(r1.step_count(), r2.step_count());
  for (int i = 0; i < r1.step_count(); ++i) {
    const auto &x = r1.steps[static_cast<std::size_t>(i)], &y = r2.steps[static_cast<std::size_t>(i)];
    ASSERT_EQ(x.position, y.position);
    ASSERT_EQ(index_of_action(x.action), index_of_action(y.action));
    ASSERT_DOUBLE_EQ(x.time, (i + 1) * 0.5);
  }
  EXPECT_EQ(r1.outcome, r2.outcome);
  EXPECT_EQ(r1.plan_ms.size(), static_cast<std::size_t>(r1.step_count()));
}

TEST(Energy, Values) {
  EXPECT_EQ(energy(record_with(Outcome::goal, 10, 0.5)), 0.0);
  EXPECT_DOUBLE_EQ(energy(record_with(Outcome::goal, 1, 0.5, {0.4, 0.52})), 2.0);
  EXPECT_DOUBLE_EQ(energy(record_with(Outcome::goal, 70, 0.5, {0.4, 0.0})), 70.0);
  EXPECT_DOUBLE_EQ(energy(record_with(Outcome::goal, 3, 0.5, {-0.4, -0.52})), 6.0);
}

TEST(Suite, AveragesOverSuccessesOnly) {
  const std::vector<EpisodeRecord> recs{record_with(Outcome::goal, 60, 0.5, {0.4, 0}),
                                        record_with(Outcome::collision, 10, 0.5, {0.4, 0.52})};
  const auto m = summarize(recs);
  EXPECT_DOUBLE_EQ(m.average_time, 30.0);
  EXPECT_DOUBLE_EQ(m.average_energy, 60.0);
  EXPECT_DOUBLE_EQ(m.success_rate, 0.5);
  EXPECT_DOUBLE_EQ(m.collision_rate, 0.5);
  EXPECT_NEAR(m.mean_plan_ms, 0.1, 1e-12);
}

TEST(Suite, RatesPartitionEpisodes) {
  const std::vector<EpisodeRecord> recs{record_with(Outcome::goal, 5, 0.5), record_with(Outcome::out_of_bounds, 5, 0.5),
                                        record_with(Outcome::out_of_bounds, 5, 0.5), record_with(Outcome::timeout, 5, 0.5)};
  const auto m = summarize(recs);
  EXPECT_DOUBLE_EQ(m.out_of_bounds_rate, 0.5);
  EXPECT_DOUBLE_EQ(m.success_rate + m.collision_rate + m.out_of_bounds_rate + m.timeout_rate, 1.0);
  EXPECT_TRUE(std::isnan(summarize(std::vector<EpisodeRecord>{record_with(Outcome::collision, 1, 0.5)}).average_time));
}

TEST(Suite, EnvironmentsFollowTestCase) {
  EnvConfig cfg;
  const auto a = suite_environment(1, 5, 0, cfg), b = suite_environment(2, 5, 0, cfg);
  EXPECT_EQ(a.vortices.size(), 4u);
  EXPECT_EQ(a.obstacles.size(), 6u);
  EXPECT_EQ(b.vortices.size(), 8u);
  EXPECT_EQ(b.obstacles.size(), 10u);
  EXPECT_EQ(a.start, (Vec2{5, 5}));
  EXPECT_EQ(a.goal, (Vec2{45, 45}));
  EXPECT_TRUE(a.enforce_boundary);
  EXPECT_EQ(a.seed, derive_seed(5, 0));
  EXPECT_THROW(suite_environment(3, 5, 0, cfg), std::invalid_argument);
}

TEST(Suite, ResultIsPureAndThreadCountIndependent) {
  const PlannerFactory f = [] { return std::make_unique<BugPlanner>(); };
  const auto one = evaluate_suite(f, 1, 12, 99, EpisodeSetup{}, 1);
  const auto four = evaluate_suite(f, 1, 12, 99, EpisodeSetup{}, 4);
  std::ostringstream a, b;
  write_suite_csv(a, one);
  write_suite_csv(b, four);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(one.metrics.successes, four.metrics.successes);
  for (const auto& r : one.episodes) EXPECT_DOUBLE_EQ(r.duration(), r.step_count() * 0.5);
  EXPECT_THROW(evaluate_suite(f, 1, 0, 99, EpisodeSetup{}), std::invalid_argument);
}

TEST(Suite, SingleReachableEpisode) {
  const PlannerFactory f = [] { return std::make_unique<ApfPlanner>(); };
  EpisodeSetup setup;
  EnvironmentState env;
  env.start = env.robot.position = {5, 5};
  env.goal = {20, 5};
  env.enforce_boundary = true;
  const auto res = evaluate_environments(f, std::vector<EnvironmentState>{env}, setup);
  EXPECT_EQ(res.metrics.success_rate, 1.0);
  EXPECT_EQ(res.metrics.out_of_bounds_rate, 0.0);
}

TEST(Csv, EpisodeRoundTrip) {
  const auto env = suite_environment(1, 3, 1, EnvConfig{});
  BugPlanner p;
  const auto rec = run_episode(p, env, EpisodeSetup{}, 0);
  std::stringstream buf;
  write_episode_csv(buf, rec);
  EXPECT_EQ(buf.str().substr(0, buf.str().find('\n')), kEpisodeCsvHeader);
  const auto back = read_episode_csv(buf);
  ASSERT_EQ(back.size(), rec.steps.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].position, rec.steps[i].position);
    EXPECT_EQ(back[i].heading, rec.steps[i].heading);
    EXPECT_EQ(back[i].reward, rec.steps[i].reward);
    EXPECT_EQ(index_of_action(back[i].action), index_of_action(rec.steps[i].action));
  }
}

TEST(Csv, NumbersRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 12345.678, 0.0}) EXPECT_EQ(parse_number(format_number(v)), v);
  EXPECT_EQ(format_number(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_TRUE(std::isnan(parse_number("nan")));
  std::istringstream bad("step,t,x\n1,2,3\n");
  EXPECT_THROW(read_episode_csv(bad), std::invalid_argument);
}

TEST(Csv, RuntimeTableFormat) {
  SuiteMetrics m;
  m.mean_plan_ms = 0.2834;
  m.max_plan_ms = 1.5;
  std::ostringstream out;
  print_runtime_table(out, {{"iqn:adaptive", m}});
  EXPECT_NE(out.str().find("mean (ms)"), std::string::npos);
  EXPECT_NE(out.str().find("iqn:adaptive"), std::string::npos);
  EXPECT_NE(out.str().find("0.2834"), std::string::npos);
}

TEST(Render, DeterministicWithMarkers) {
  EnvConfig cfg;
  const auto env = suite_environment(1, 8, 0, cfg);
  ApfPlanner p;
  const auto rec = run_episode(p, env, EpisodeSetup{}, 0);
  const std::string a = render_svg(env, cfg, rec.steps), b = render_svg(env, cfg, rec.steps);
  EXPECT_EQ(a, b);
  EXPECT_NE(a.find("id=\"trajectory\""), std::string::npos);
  EXPECT_NE(a.find("id=\"boundary\""), std::string::npos);

  const std::string bare = render_svg(env, cfg, {});
  EXPECT_EQ(bare.find("id=\"trajectory\""), std::string::npos);
  EXPECT_NE(bare.find("id=\"obstacles\""), std::string::npos);
}

TEST(Render, OutOfBoundsMarker) {
  EnvConfig cfg;
  EnvironmentState env;
  env.enforce_boundary = true;
  env.start = env.robot.position = {48, 25};
  env.goal = {5, 5};
  std::vector<StepRecord> steps;
  for (int i = 1; i <= 4; ++i) steps.push_back({i * 1.0, {48.0 + i, 25.0}, 0.0, 1.0, {}, -1.0, 1.0});
  EXPECT_NE(render_svg(env, cfg, steps).find("id=\"out-of-bounds\""), std::string::npos);
  steps.resize(1);
  EXPECT_EQ(render_svg(env, cfg, steps).find("id=\"out-of-bounds\""), std::string::npos);
}

TEST(Render, RejectsImpossibleTrajectory) {
  EnvConfig cfg;
  EnvironmentState env;
  env.start = env.robot.position = {5, 5};
  std::vector<StepRecord> steps{{1.0, {40, 40}, 0, 1, {}, 0, 1}};
  EXPECT_THROW(render_svg(env, cfg, steps), std::invalid_argument);
  std::vector<StepRecord> backwards{{1.0, {5.5, 5}, 0, 1, {}, 0, 1}, {0.5, {6, 5}, 0, 1, {}, 0, 1}};
  EXPECT_THROW(render_svg(env, cfg, backwards), std::invalid_argument);
}

TEST(Config, DefaultsAndOverrides) {
  const auto rc = parse_run_config(nlohmann::json::parse(R"({
    "seed": 7,
    "env": {"v_max": 1.5},
    "sensor": {"beam_count": 31},
    "train": {"total_steps": 1000, "fixed_phase": 1},
    "eval": {"test_case": 2, "episodes": 10}
  })"));
  EXPECT_EQ(rc.seed, 7u);
  EXPECT_EQ(rc.train.env.v_max, 1.5);
  EXPECT_EQ(rc.train.env.goal_radius, 2.0);
  EXPECT_EQ(rc.train.sensor.beam_count, 31);
  EXPECT_EQ(rc.train.topology.lidar_beams, 31);
  EXPECT_EQ(rc.train.total_steps, 1000);
  EXPECT_EQ(rc.train.batch_size, 32);
  EXPECT_EQ(rc.eval.test_case, 2);
  EXPECT_EQ(rc.eval.dt, 0.5);
}

TEST(Config, RejectsUnknownKeys) {
  EXPECT_THROW(parse_run_config(nlohmann::json::parse(R"({"sede": 1})")), ConfigError);
  EXPECT_THROW(parse_run_config(nlohmann::json::parse(R"({"train": {"lr": 1}})")), ConfigError);
  EXPECT_THROW(parse_run_config(nlohmann::json::parse(R"({"env": {"gravity": 9.8}})")), ConfigError);
  EXPECT_THROW(parse_run_config(nlohmann::json::parse(R"({"eval": {"episodes": "many"}})")), ConfigError);
  EXPECT_THROW(parse_run_config(nlohmann::json::parse("[1, 2]")), ConfigError);
}
