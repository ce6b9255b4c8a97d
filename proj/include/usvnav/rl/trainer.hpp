#pragma once

#include <array>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "usvnav/env/generator.hpp"
#include "usvnav/eval/suite.hpp"
#include "usvnav/nn/adam.hpp"
#include "usvnav/planners/learned.hpp"
#include "usvnav/rl/losses.hpp"
#include "usvnav/rl/schedule.hpp"

namespace usvnav::rl {

struct TrainConfig {
  long long total_steps = 3'000'000;
  double dt = 1.0;
  int batch_size = 32;
  double gamma = 0.99;
  double learning_rate = 1e-4;
  int n = 8;
  int n_target = 8;
  int k = 32;
  double phi_train = 1.0;
  double kappa = 1.0;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double epsilon_fraction = 0.1;
  long long phase_length = 1'000'000;  // curriculum boundary spacing
  int fixed_phase = 0;                 // 1..3 pins the difficulty; 0 follows the curriculum
  long long eval_interval = 10'000;
  int eval_envs_per_phase = 10;
  std::uint64_t eval_seed = 2023;
  long long learning_starts = 5'000;
  int train_freq = 4;
  int target_update = 1'000;  // gradient steps between hard target copies
  std::size_t buffer_capacity = 1'000'000;
  nn::Topology topology;
  EnvConfig env;
  SensorConfig sensor;
  RewardParams rewards;

  void validate() const {
    auto positive = [](bool ok, const char* what) {
      if (!ok) throw std::invalid_argument(std::string("training config: ") + what + " must be positive");
    };
    if (total_steps < 0) throw std::invalid_argument("training config: total_steps must be non-negative");
    positive(dt > 0, "dt");
    positive(batch_size > 0, "batch_size");
    positive(gamma > 0 && gamma < 1, "gamma (and < 1)");
    positive(learning_rate > 0, "learning_rate");
    positive(n > 0 && n_target > 0 && k > 0, "n, n_target and k");
    positive(phi_train > 0 && phi_train <= 1, "phi_train (and <= 1)");
    positive(kappa > 0, "kappa");
    positive(phase_length > 0, "phase_length");
    positive(eval_interval > 0, "eval_interval");
    positive(eval_envs_per_phase > 0, "eval_envs_per_phase");
    positive(train_freq > 0, "train_freq");
    positive(target_update > 0, "target_update");
    positive(buffer_capacity > 0, "buffer_capacity");
    if (fixed_phase < 0 || fixed_phase > 3) throw std::invalid_argument("training config: fixed_phase must be 0..3");
    if (learning_starts < 0) throw std::invalid_argument("training config: learning_starts must be non-negative");
    if (topology.lidar_beams != sensor.beam_count) {
      throw std::invalid_argument("training config: network lidar width differs from sensor beam count");
    }
  }
};

/// Greedy evaluation over the fixed training-time environment set.
struct EvalPoint {
  long long step = 0;
  double mean_reward = 0.0;
  double success_rate = 0.0;
  std::array<double, 3> phase_reward{};
  std::array<double, 3> phase_success{};
};

/// The 3 x eval_envs_per_phase environments evaluated during training: phase
/// entity counts, fixed lower-left start and upper-right goal.
inline std::vector<EnvironmentState> training_eval_environments(const TrainConfig& cfg) {
  std::vector<EnvironmentState> envs;
  for (int phase = 1; phase <= 3; ++phase) {
    for (int i = 0; i < cfg.eval_envs_per_phase; ++i) {
      GenerationOptions opts;
      opts.start = kEvalStart;
      opts.goal = kEvalGoal;
      envs.push_back(generate_environment(
          phase, derive_seed(cfg.eval_seed, static_cast<std::uint64_t>(phase * 100000 + i)), cfg.env, opts));
    }
  }
  return envs;
}

inline PlannerFactory greedy_planner_factory(const nn::Model<float>& model, const TrainConfig& cfg) {
  auto shared = std::make_shared<const nn::Model<float>>(model);
  if (model.kind() == nn::AgentKind::iqn) {
    return [shared, cfg] { return std::make_unique<IqnPlanner>(shared, cfg.phi_train, cfg.sensor, cfg.k); };
  }
  return [shared, cfg] { return std::make_unique<DqnPlanner>(shared, cfg.sensor); };
}

/// Episodic epsilon-greedy training of an IQN or DQN agent with experience
/// replay, a hard-synchronized target network and curriculum environments.
class Trainer {
 public:
  struct Hooks {
    std::function<void(const EvalPoint&)> on_eval;
    std::function<void(long long step, const nn::Model<float>&)> on_checkpoint;
    std::function<void(long long step, int episodes, double last_loss)> on_progress;
  };

  Trainer(nn::AgentKind kind, TrainConfig cfg, std::uint64_t seed)
      : cfg_(std::move(cfg)),
        seed_(seed),
        online_(nn::Model<float>::create(kind, cfg_.topology, derive_seed(seed, 2))),
        target_(online_),
        adam_(online_, nn::AdamConfig{cfg_.learning_rate}),
        buffer_(cfg_.buffer_capacity, cfg_.topology.input_size()),
        rng_(derive_seed(seed, 1)),
        eval_envs_(training_eval_environments(cfg_)) {
    cfg_.validate();
  }

  /// Continues from weights of an earlier run at `step`. Replay memory and
  /// optimizer moments start fresh.
  void resume_from(const nn::Model<float>& model, long long step) {
    if (model.kind() != online_.kind() || !(model.topology() == online_.topology())) {
      throw std::invalid_argument("resume checkpoint does not match the agent");
    }
    online_ = model;
    target_ = model;
    step_ = step;
    rng_ = Rng(derive_seed(seed_, 1 + static_cast<std::uint64_t>(step)));
  }

  const TrainConfig& config() const { return cfg_; }
  const nn::Model<float>& model() const { return online_; }
  long long step() const { return step_; }
  long long gradient_steps() const { return grad_steps_; }
  int episodes() const { return episodes_; }
  const ReplayBuffer& buffer() const { return buffer_; }

  int phase_at(long long step) const {
    return cfg_.fixed_phase > 0 ? cfg_.fixed_phase : curriculum_phase(step, cfg_.phase_length);
  }

  EvalPoint evaluate() const {
    EpisodeSetup setup{cfg_.env, cfg_.sensor, cfg_.rewards, cfg_.dt};
    const auto result = evaluate_environments(greedy_planner_factory(online_, cfg_), eval_envs_, setup);
    EvalPoint p;
    p.step = step_;
    const int per = cfg_.eval_envs_per_phase;
    for (int phase = 0; phase < 3; ++phase) {
      double reward = 0.0, success = 0.0;
      for (int i = 0; i < per; ++i) {
        const auto& rec = result.episodes[static_cast<std::size_t>(phase * per + i)];
        reward += rec.total_reward();
        success += rec.outcome == Outcome::goal ? 1.0 : 0.0;
      }
      p.phase_reward[static_cast<std::size_t>(phase)] = reward / per;
      p.phase_success[static_cast<std::size_t>(phase)] = success / per;
      p.mean_reward += reward / (3.0 * per);
      p.success_rate += success / (3.0 * per);
    }
    return p;
  }

  /// Runs until cfg.total_steps environment steps have been taken.
  void run(const Hooks& hooks = {}) {
    if (step_ == 0 && hooks.on_checkpoint) hooks.on_checkpoint(0, online_);
    double last_loss = 0.0;
    while (step_ < cfg_.total_steps) {
      if (!sim_) begin_episode();
      const int a = choose_action();
      const Simulator::Step st = sim_->step(action_from_index(a), cfg_.dt);
      const EncodedObservation next = encode(observe(sim_->state(), cfg_.sensor), cfg_.sensor);
      const bool terminal = st.outcome == Outcome::goal || st.outcome == Outcome::collision ||
                            st.outcome == Outcome::out_of_bounds;
      buffer_.push(obs_.flat(), a, static_cast<float>(st.reward), next.flat(), terminal);
      ++step_;

      if (static_cast<long long>(buffer_.size()) >= cfg_.learning_starts && step_ % cfg_.train_freq == 0) {
        last_loss = gradient_step();
      }
      if (st.outcome != Outcome::running) {
        sim_.reset();
        ++episodes_;
      } else {
        obs_ = next;
      }
      if (hooks.on_progress && step_ % 1000 == 0) hooks.on_progress(step_, episodes_, last_loss);
      if (step_ % cfg_.eval_interval == 0) {
        const EvalPoint p = evaluate();
        if (hooks.on_eval) hooks.on_eval(p);
        if (hooks.on_checkpoint) hooks.on_checkpoint(step_, online_);
      }
    }
  }

  /// One optimizer update on a sampled mini-batch; returns the loss.
  double gradient_step() {
    const auto batch = buffer_.sample<float>(rng_, cfg_.batch_size);
    LossResult<float> res;
    if (online_.kind() == nn::AgentKind::iqn) {
      const auto samples = IqnSamples::draw(rng_, cfg_.batch_size, cfg_.n, cfg_.n_target, cfg_.k);
      res = iqn_loss(online_, target_, batch, samples, IqnLossOptions{cfg_.gamma, cfg_.kappa, cfg_.phi_train});
    } else {
      res = dqn_loss(online_, target_, batch, static_cast<float>(cfg_.gamma));
    }
    nn::adam_step(online_, res.grads, adam_);
    if (++grad_steps_ % cfg_.target_update == 0) target_ = online_;
    return res.loss;
  }

 private:
  void begin_episode() {
    const int phase = phase_at(step_);
    const auto env_seed = derive_seed(derive_seed(seed_, 3), static_cast<std::uint64_t>(episodes_) + (static_cast<std::uint64_t>(step_) << 20));
    sim_.emplace(generate_environment(phase, env_seed, cfg_.env), cfg_.env, cfg_.rewards);
    obs_ = encode(observe(sim_->state(), cfg_.sensor), cfg_.sensor);
  }

  int choose_action() {
    const double eps = epsilon_at(step_, cfg_.total_steps, cfg_.epsilon_start, cfg_.epsilon_end, cfg_.epsilon_fraction);
    if (rng_.bernoulli(eps)) return static_cast<int>(rng_.below(static_cast<std::uint64_t>(kNumActions)));
    if (online_.kind() == nn::AgentKind::iqn) return select_action_iqn(online_, obs_, cfg_.phi_train, cfg_.k, rng_);
    return select_action_dqn(online_, obs_);
  }

  TrainConfig cfg_;
  std::uint64_t seed_;
  nn::Model<float> online_;
  nn::Model<float> target_;
  nn::AdamState<float> adam_;
  ReplayBuffer buffer_;
  Rng rng_;
  std::vector<EnvironmentState> eval_envs_;
  std::optional<Simulator> sim_;
  EncodedObservation obs_;
  long long step_ = 0;
  long long grad_steps_ = 0;
  int episodes_ = 0;
};

}  // namespace usvnav::rl
