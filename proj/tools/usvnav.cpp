// usvnav command-line interface: train, eval, compare, render,
// inspect-checkpoint and snapshot.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "usvnav/usvnav.hpp"

namespace fs = std::filesystem;
using namespace usvnav;

namespace {

constexpr int kRuntimeFailure = 1;
constexpr int kUsageError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

RunConfig load_config(const std::string& path) {
  if (path.empty()) return RunConfig{};
  try {
    return load_run_config(path);
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
}

void require_directory(const std::string& dir) {
  if (dir.empty() || !fs::is_directory(dir)) throw UsageError("output directory does not exist: " + dir);
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

struct TrainArgs {
  std::string agent = "iqn";
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<long long> steps;
  std::optional<int> phase;
  bool resume = false;
  bool quiet = false;
};

int cmd_train(const TrainArgs& a) {
  RunConfig rc = load_config(a.config);
  if (a.seed) rc.seed = *a.seed;
  if (a.steps) rc.train.total_steps = *a.steps;
  if (a.phase) rc.train.fixed_phase = *a.phase;
  require_directory(a.out);
  nn::AgentKind kind;
  try {
    kind = nn::agent_kind_from_string(a.agent);
    rc.train.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  rl::TrainRunOptions opt;
  opt.checkpoint_interval = rc.checkpoint_interval;
  opt.resume = a.resume;
  opt.progress = a.quiet ? nullptr : &std::cout;
  const auto res = rl::train_to_directory(kind, rc.train, rc.seed, a.out, opt);
  std::cout << "trained " << a.agent << " to step " << res.final_step << "; outputs in " << a.out << '\n';
  return 0;
}

struct EvalArgs {
  std::vector<std::string> planners;
  std::string checkpoint;
  std::string config;
  std::string out;
  std::optional<int> test_case;
  std::optional<int> episodes;
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::optional<unsigned> threads;
  bool save_episodes = false;
};

int cmd_eval(const EvalArgs& a) {
  RunConfig rc = load_config(a.config);
  auto& ev = rc.eval;
  if (a.test_case) ev.test_case = *a.test_case;
  if (a.episodes) ev.episodes = *a.episodes;
  if (a.seed) ev.seed = *a.seed;
  if (a.dt) ev.dt = *a.dt;
  if (a.threads) ev.threads = *a.threads;
  if (ev.test_case != 1 && ev.test_case != 2) throw UsageError("--case must be 1 or 2");
  if (ev.episodes < 1) throw UsageError("--n must be at least 1");
  if (!(ev.dt > 0.0)) throw UsageError("--dt must be positive");
  if (!a.out.empty()) require_directory(a.out);

  std::vector<PlannerSpec> specs;
  try {
    for (const auto& p : a.planners) specs.push_back(parse_planner_spec(p));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  std::optional<nn::Checkpoint> ck;
  if (!a.checkpoint.empty()) {
    try {
      ck = nn::load_checkpoint(a.checkpoint);
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
  }
  std::vector<PlannerFactory> factories;
  for (const auto& s : specs) {
    try {
      factories.push_back(make_planner_factory(s, ck, rc.train.sensor, rc.train.env.v_max, ev.iqn_samples));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }

  const EpisodeSetup setup{rc.train.env, rc.train.sensor, rc.train.rewards, ev.dt};
  std::vector<EnvironmentState> envs;
  for (int i = 0; i < ev.episodes; ++i) envs.push_back(suite_environment(ev.test_case, ev.seed, i, setup.env));

  std::vector<std::pair<std::string, SuiteMetrics>> rows;
  std::optional<std::ofstream> summary;
  if (!a.out.empty()) {
    summary.emplace(open_output(fs::path(a.out) / "summary.csv"));
    *summary << kSummaryCsvHeader << '\n';
  }
  for (std::size_t p = 0; p < specs.size(); ++p) {
    const auto res = evaluate_environments(factories[p], envs, setup, ev.threads);
    const std::string label = specs[p].label();
    rows.emplace_back(label, res.metrics);
    if (!a.out.empty()) {
      write_summary_row(*summary, label, ev.test_case, res.metrics);
      std::string stem = label;
      std::replace(stem.begin(), stem.end(), ':', '_');
      auto episodes = open_output(fs::path(a.out) / ("episodes_" + stem + ".csv"));
      write_suite_csv(episodes, res);
      if (a.save_episodes) {
        const fs::path dir = fs::path(a.out) / ("trajectories_" + stem);
        fs::create_directories(dir);
        for (std::size_t i = 0; i < res.episodes.size(); ++i) {
          auto f = open_output(dir / ("episode_" + std::to_string(i) + ".csv"));
          write_episode_csv(f, res.episodes[i]);
          save_snapshot((dir / ("env_" + std::to_string(i) + ".json")).string(), envs[i], setup.env);
        }
      }
    }
  }
  std::cout << "test case " << ev.test_case << " (" << test_case_spec(ev.test_case).vortices << " vortices, "
            << test_case_spec(ev.test_case).obstacles << " obstacles), " << ev.episodes << " environments, seed "
            << ev.seed << "\n\n";
  print_results_table(std::cout, rows);
  std::cout << "\nruntime per action\n";
  print_runtime_table(std::cout, rows);
  if (!a.out.empty()) {
    auto rt = open_output(fs::path(a.out) / "runtime.txt");
    print_runtime_table(rt, rows);
    if (!*summary) throw std::runtime_error("failed writing summary.csv");
  }
  return 0;
}

int cmd_render(const std::string& episode, const std::string& snapshot, const std::string& out) {
  Snapshot snap;
  std::vector<StepRecord> steps;
  try {
    snap = load_snapshot(snapshot);
    std::ifstream in(episode);
    if (!in) throw std::runtime_error("cannot read episode CSV: " + episode);
    steps = read_episode_csv(in);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  std::string svg;
  try {
    svg = render_svg(snap.env, snap.config, steps);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  auto f = open_output(out);
  f << svg;
  if (!f) throw std::runtime_error("failed writing " + out);
  return 0;
}

int cmd_inspect(const std::string& path) {
  nn::Checkpoint ck;
  try {
    ck = nn::load_checkpoint(path);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  std::cout << "agent      " << to_string(ck.kind) << "\nseed       " << ck.seed << "\nstep       " << ck.step
            << "\ntopology   " << nn::topology_string(ck.model.topology()) << "\nparameters "
            << ck.model.parameter_count() << '\n';
  for (const auto& [k, v] : ck.metadata) std::cout << "meta       " << k << " = " << v << '\n';
  const auto& layers = ck.model.layers();
  for (std::size_t i = 0; i < layers.size(); ++i) {
    std::cout << "layer " << i << "    " << layers[i].in() << " -> " << layers[i].out() << " "
              << nn::to_string(layers[i].activation) << '\n';
  }
  return 0;
}

int cmd_snapshot(const std::string& config, int phase, std::optional<int> test_case, std::uint64_t seed, int index,
                 const std::string& out) {
  RunConfig rc = load_config(config);
  EnvironmentState env;
  try {
    env = test_case ? suite_environment(*test_case, seed, index, rc.train.env)
                    : generate_environment(phase, seed, rc.train.env);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  save_snapshot(out, env, rc.train.env);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"usvnav: marine navigation under vortex currents with risk-sensitive learned and classical planners"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* t = app.add_subcommand("train", "train an IQN or DQN agent");
  t->add_option("--agent", train.agent, "iqn or dqn")->check(CLI::IsMember({"iqn", "dqn"}));
  t->add_option("--config", train.config, "JSON run configuration");
  t->add_option("--seed", train.seed, "master seed");
  t->add_option("--steps", train.steps, "total environment steps");
  t->add_option("--phase", train.phase, "pin curriculum difficulty to phase 1, 2 or 3");
  t->add_option("--out", train.out, "existing output directory")->required();
  t->add_flag("--resume", train.resume, "continue from <out>/latest.ckpt");
  t->add_flag("--quiet", train.quiet, "no progress output");

  EvalArgs eval;
  auto* e = app.add_subcommand("eval", "evaluate a planner on a test case");
  e->add_option("--planner", eval.planners, "apf, ba, dqn, iqn:<phi> or iqn:adaptive")->required()->expected(1);
  auto add_eval_options = [&eval](CLI::App* cmd) {
    cmd->add_option("--checkpoint", eval.checkpoint, "model checkpoint for dqn/iqn planners");
    cmd->add_option("--config", eval.config, "JSON run configuration");
    cmd->add_option("--case", eval.test_case, "test case 1 (4 vortices, 6 obstacles) or 2 (8, 10)");
    cmd->add_option("--n", eval.episodes, "number of environments");
    cmd->add_option("--seed", eval.seed, "suite master seed");
    cmd->add_option("--dt", eval.dt, "control time step (s)");
    cmd->add_option("--threads", eval.threads, "parallel episode workers");
    cmd->add_option("--out", eval.out, "existing directory for CSV outputs");
    cmd->add_flag("--save-episodes", eval.save_episodes, "also write per-episode trajectories and snapshots");
  };
  add_eval_options(e);

  auto* c = app.add_subcommand("compare", "evaluate several planners on identical environments");
  c->add_option("--planners", eval.planners, "planner list")->required()->expected(1, -1);
  add_eval_options(c);

  std::string episode, snapshot, svg_out;
  auto* r = app.add_subcommand("render", "render an episode over its environment as SVG");
  r->add_option("--episode", episode, "episode CSV")->required();
  r->add_option("--snapshot", snapshot, "environment snapshot JSON")->required();
  r->add_option("--out", svg_out, "SVG output path")->required();

  std::string ckpt_path;
  auto* ins = app.add_subcommand("inspect-checkpoint", "print checkpoint metadata and layer shapes");
  ins->add_option("checkpoint", ckpt_path, "checkpoint file")->required();

  std::string snap_config, snap_out;
  int snap_phase = 1, snap_index = 0;
  std::optional<int> snap_case;
  std::uint64_t snap_seed = 0;
  auto* sn = app.add_subcommand("snapshot", "write a generated environment as a snapshot document");
  sn->add_option("--config", snap_config, "JSON run configuration");
  sn->add_option("--phase", snap_phase, "curriculum phase 1-3");
  sn->add_option("--case", snap_case, "generate suite environment of test case 1 or 2 instead");
  sn->add_option("--index", snap_index, "suite environment index (with --case)");
  sn->add_option("--seed", snap_seed, "generation seed (suite master seed with --case)");
  sn->add_option("--out", snap_out, "output JSON path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*t) return cmd_train(train);
    if (*e || *c) return cmd_eval(eval);
    if (*r) return cmd_render(episode, snapshot, svg_out);
    if (*ins) return cmd_inspect(ckpt_path);
    if (*sn) return cmd_snapshot(snap_config, snap_phase, snap_case, snap_seed, snap_index, snap_out);
  } catch (const UsageError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kUsageError;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kRuntimeFailure;
  }
  return kUsageError;
}
