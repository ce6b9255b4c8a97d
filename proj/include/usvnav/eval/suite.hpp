#pragma once

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <thread>

#include "usvnav/core/random.hpp"
#include "usvnav/env/generator.hpp"
#include "usvnav/eval/episode.hpp"

namespace usvnav {

struct SuiteMetrics {
  int episodes = 0;
  int successes = 0;
  int collisions = 0;
  int out_of_bounds = 0;
  int timeouts = 0;
  double success_rate = 0.0;
  double collision_rate = 0.0;
  double out_of_bounds_rate = 0.0;
  double timeout_rate = 0.0;
  double average_time = std::numeric_limits<double>::quiet_NaN();    // successful episodes only
  double average_energy = std::numeric_limits<double>::quiet_NaN();  // successful episodes only
  double mean_plan_ms = 0.0;
  double max_plan_ms = 0.0;
};

/// Aggregates episode records; the result does not depend on record order
/// beyond floating-point summation in the given sequence.
inline SuiteMetrics summarize(std::span<const EpisodeRecord> records) {
  SuiteMetrics m;
  m.episodes = static_cast<int>(records.size());
  double time_sum = 0.0, energy_sum = 0.0, ms_sum = 0.0;
  std::size_t ms_count = 0;
  for (const auto& r : records) {
    switch (r.outcome) {
      case Outcome::goal:
        ++m.successes;
        time_sum += r.duration();
        energy_sum += energy(r);
        break;
      case Outcome::collision: ++m.collisions; break;
      case Outcome::out_of_bounds: ++m.out_of_bounds; break;
      default: ++m.timeouts; break;
    }
    for (double ms : r.plan_ms) {
      ms_sum += ms;
      m.max_plan_ms = std::max(m.max_plan_ms, ms);
    }
    ms_count += r.plan_ms.size();
  }
  if (m.episodes > 0) {
    const double n = m.episodes;
    m.success_rate = m.successes / n;
    m.collision_rate = m.collisions / n;
    m.out_of_bounds_rate = m.out_of_bounds / n;
    m.timeout_rate = m.timeouts / n;
  }
  if (m.successes > 0) {
    m.average_time = time_sum / m.successes;
    m.average_energy = energy_sum / m.successes;
  }
  if (ms_count > 0) m.mean_plan_ms = ms_sum / static_cast<double>(ms_count);
  return m;
}

/// Evaluation test cases: 1 = (4 vortices, 6 obstacles), 2 = (8 vortices, 10 obstacles).
inline PhaseSpec test_case_spec(int test_case) {
  switch (test_case) {
    case 1: return phase_spec(1);
    case 2: return phase_spec(3);
    default: throw std::invalid_argument("test case must be 1 or 2, got " + std::to_string(test_case));
  }
}

inline constexpr Vec2 kEvalStart{5.0, 5.0};
inline constexpr Vec2 kEvalGoal{45.0, 45.0};

/// Environment `index` of a suite: fixed lower-left start and upper-right goal,
/// boundary enforced, everything else drawn from derive_seed(master, index).
inline EnvironmentState suite_environment(int test_case, std::uint64_t master_seed, int index, const EnvConfig& cfg) {
  GenerationOptions opts;
  opts.start = kEvalStart;
  opts.goal = kEvalGoal;
  opts.enforce_boundary = true;
  opts.counts = test_case_spec(test_case);
  return generate_environment(test_case == 1 ? 1 : 3, derive_seed(master_seed, static_cast<std::uint64_t>(index)), cfg,
                              opts);
}

struct SuiteResult {
  SuiteMetrics metrics;
  std::vector<EpisodeRecord> episodes;
};

/// Runs `n_envs` episodes, each with its own planner instance and RNG
/// stream. Episodes may run on `threads` workers; records are stored by index
/// so the result is identical for any thread count.
inline SuiteResult evaluate_environments(const PlannerFactory& make_planner, std::span<const EnvironmentState> envs,
                                         const EpisodeSetup& setup, unsigned threads = 1) {
  SuiteResult out;
  out.episodes.resize(envs.size());
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < envs.size(); i += stride) {
      auto planner = make_planner();
      out.episodes[i] = run_episode(*planner, envs[i], setup, derive_seed(envs[i].seed, 1));
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(envs.size())));
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
  }
  out.metrics = summarize(out.episodes);
  return out;
}

inline SuiteResult evaluate_suite(const PlannerFactory& make_planner, int test_case, int n_envs,
                                  std::uint64_t master_seed, const EpisodeSetup& setup, unsigned threads = 1) {
  if (n_envs < 1) throw std::invalid_argument("suite needs at least one environment");
  std::vector<EnvironmentState> envs;
  envs.reserve(static_cast<std::size_t>(n_envs));
  for (int i = 0; i < n_envs; ++i) envs.push_back(suite_environment(test_case, master_seed, i, setup.env));
  return evaluate_environments(make_planner, envs, setup, threads);
}

}  // namespace usvnav
