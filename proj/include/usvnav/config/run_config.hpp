#pragma once

#include <fstream>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "usvnav/env/snapshot.hpp"
#include "usvnav/rl/trainer.hpp"

namespace usvnav {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Suite-evaluation parameters.
struct EvalConfig {
  int test_case = 1;
  int episodes = 500;
  std::uint64_t seed = 2024;
  double dt = 0.5;
  unsigned threads = 1;
  int iqn_samples = 32;
};

/// Everything a command can be configured with. Loaded from a JSON document
/// whose sections mirror the members; unknown keys are rejected and missing
/// keys keep their defaults.
struct RunConfig {
  std::uint64_t seed = 1;
  long long checkpoint_interval = 100'000;
  rl::TrainConfig train;
  EvalConfig eval;
};

namespace detail {

using Setter = std::function<void(const nlohmann::json&)>;

template <class T>
Setter bind(T& field) {
  return [&field](const nlohmann::json& v) { field = v.get<T>(); };
}

inline void apply_section(const nlohmann::json& section, const std::string& name, const std::map<std::string, Setter>& fields) {
  if (!section.is_object()) throw ConfigError("config section '" + name + "' must be an object");
  for (const auto& [key, value] : section.items()) {
    const auto it = fields.find(key);
    if (it == fields.end()) throw ConfigError("unknown config key: " + name + "." + key);
    try {
      it->second(value);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("bad value for " + name + "." + key + ": " + e.what());
    }
  }
}

}  // namespace detail

inline RunConfig parse_run_config(const nlohmann::json& doc) {
  using detail::bind;
  RunConfig rc;
  auto& t = rc.train;
  if (!doc.is_object()) throw ConfigError("config document must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key == "seed") {
      rc.seed = value.get<std::uint64_t>();
    } else if (key == "checkpoint_interval") {
      rc.checkpoint_interval = value.get<long long>();
    } else if (key == "env") {
      try {
        t.env = env_config_from_json(value);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    } else if (key == "sensor") {
      detail::apply_section(value, key,
                            {{"beam_count", bind(t.sensor.beam_count)},
                             {"angle_min", bind(t.sensor.angle_min)},
                             {"angle_max", bind(t.sensor.angle_max)},
                             {"range", bind(t.sensor.range)}});
    } else if (key == "rewards") {
      detail::apply_section(value, key,
                            {{"step", bind(t.rewards.step)},
                             {"collision", bind(t.rewards.collision)},
                             {"goal", bind(t.rewards.goal)},
                             {"progress_gain", bind(t.rewards.progress_gain)},
                             {"discount", bind(t.rewards.discount)}});
    } else if (key == "network") {
      detail::apply_section(value, key,
                            {{"velocity_hidden", bind(t.topology.velocity_hidden)},
                             {"goal_hidden", bind(t.topology.goal_hidden)},
                             {"lidar_hidden", bind(t.topology.lidar_hidden)},
                             {"state_hidden", bind(t.topology.state_hidden)},
                             {"cosine_features", bind(t.topology.cosine_features)},
                             {"head_hidden", bind(t.topology.head_hidden)}});
    } else if (key == "train") {
      detail::apply_section(value, key,
                            {{"total_steps", bind(t.total_steps)},
                             {"dt", bind(t.dt)},
                             {"batch_size", bind(t.batch_size)},
                             {"gamma", bind(t.gamma)},
                             {"learning_rate", bind(t.learning_rate)},
                             {"n", bind(t.n)},
                             {"n_target", bind(t.n_target)},
                             {"k", bind(t.k)},
                             {"phi_train", bind(t.phi_train)},
                             {"kappa", bind(t.kappa)},
                             {"epsilon_start", bind(t.epsilon_start)},
                             {"epsilon_end", bind(t.epsilon_end)},
                             {"epsilon_fraction", bind(t.epsilon_fraction)},
                             {"phase_length", bind(t.phase_length)},
                             {"fixed_phase", bind(t.fixed_phase)},
                             {"eval_interval", bind(t.eval_interval)},
                             {"eval_envs_per_phase", bind(t.eval_envs_per_phase)},
                             {"eval_seed", bind(t.eval_seed)},
                             {"learning_starts", bind(t.learning_starts)},
                             {"train_freq", bind(t.train_freq)},
                             {"target_update", bind(t.target_update)},
                             {"buffer_capacity", bind(t.buffer_capacity)}});
    } else if (key == "eval") {
      detail::apply_section(value, key,
                            {{"test_case", bind(rc.eval.test_case)},
                             {"episodes", bind(rc.eval.episodes)},
                             {"seed", bind(rc.eval.seed)},
                             {"dt", bind(rc.eval.dt)},
                             {"threads", bind(rc.eval.threads)},
                             {"iqn_samples", bind(rc.eval.iqn_samples)}});
    } else {
      throw ConfigError("unknown config key: " + key);
    }
  }
  // the network's LiDAR input width always follows the sensor
  t.topology.lidar_beams = t.sensor.beam_count;
  return rc;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file is not valid JSON: " + std::string(e.what()));
  }
  return parse_run_config(doc);
}

}  // namespace usvnav
