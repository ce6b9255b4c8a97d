#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "usvnav/env/types.hpp"

namespace usvnav {

/// Environment snapshot document (JSON). Doubles are written in shortest
/// round-trip form, so load(save(env)) == env exactly.
///
///   { "format": "usvnav-environment", "version": 1, "seed": u64, "phase": int,
///     "boundary": {"lo","hi","enforced"}, "start": [x,y], "goal": [x,y],
///     "robot": {"x","y","heading","steer_speed"}, "step_count": int,
///     "vortices": [{"x","y","core_radius","circulation"}...],
///     "obstacles": [{"x","y","radius"}...], "config": {...EnvConfig} }
inline nlohmann::json env_config_to_json(const EnvConfig& c) {
  return {{"map_size", c.map_size},
          {"v_max", c.v_max},
          {"robot_radius", c.robot_radius},
          {"goal_radius", c.goal_radius},
          {"edge_speed_min", c.edge_speed_min},
          {"edge_speed_max", c.edge_speed_max},
          {"core_radius_min", c.core_radius_min},
          {"core_radius_max", c.core_radius_max},
          {"obstacle_radius_min", c.obstacle_radius_min},
          {"obstacle_radius_max", c.obstacle_radius_max},
          {"obstacle_clearance", c.obstacle_clearance},
          {"vortex_clearance", c.vortex_clearance},
          {"substeps", c.substeps},
          {"max_steps", c.max_steps},
          {"generation_attempts", c.generation_attempts}};
}

/// Reads an EnvConfig object, rejecting unknown keys; missing keys keep defaults.
inline EnvConfig env_config_from_json(const nlohmann::json& j) {
  EnvConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "map_size") c.map_size = value.get<double>();
    else if (key == "v_max") c.v_max = value.get<double>();
    else if (key == "robot_radius") c.robot_radius = value.get<double>();
    else if (key == "goal_radius") c.goal_radius = value.get<double>();
    else if (key == "edge_speed_min") c.edge_speed_min = value.get<double>();
    else if (key == "edge_speed_max") c.edge_speed_max = value.get<double>();
    else if (key == "core_radius_min") c.core_radius_min = value.get<double>();
    else if (key == "core_radius_max") c.core_radius_max = value.get<double>();
    else if (key == "obstacle_radius_min") c.obstacle_radius_min = value.get<double>();
    else if (key == "obstacle_radius_max") c.obstacle_radius_max = value.get<double>();
    else if (key == "obstacle_clearance") c.obstacle_clearance = value.get<double>();
    else if (key == "vortex_clearance") c.vortex_clearance = value.get<double>();
    else if (key == "substeps") c.substeps = value.get<int>();
    else if (key == "max_steps") c.max_steps = value.get<int>();
    else if (key == "generation_attempts") c.generation_attempts = value.get<int>();
    else throw std::invalid_argument("unknown environment config key: " + key);
  }
  return c;
}

inline nlohmann::json snapshot_to_json(const EnvironmentState& env, const EnvConfig& cfg) {
  nlohmann::json j;
  j["format"] = "usvnav-environment";
  j["version"] = 1;
  j["seed"] = env.seed;
  j["phase"] = env.phase;
  j["boundary"] = {{"lo", env.boundary.lo}, {"hi", env.boundary.hi}, {"enforced", env.enforce_boundary}};
  j["start"] = {env.start.x, env.start.y};
  j["goal"] = {env.goal.x, env.goal.y};
  j["robot"] = {{"x", env.robot.position.x},
                {"y", env.robot.position.y},
                {"heading", env.robot.heading},
                {"steer_speed", env.robot.steer_speed}};
  j["step_count"] = env.step_count;
  auto& vs = j["vortices"] = nlohmann::json::array();
  for (const auto& v : env.vortices) {
    vs.push_back({{"x", v.center.x}, {"y", v.center.y}, {"core_radius", v.core_radius}, {"circulation", v.circulation}});
  }
  auto& os = j["obstacles"] = nlohmann::json::array();
  for (const auto& o : env.obstacles) os.push_back({{"x", o.center.x}, {"y", o.center.y}, {"radius", o.radius}});
  j["config"] = env_config_to_json(cfg);
  return j;
}

struct Snapshot {
  EnvironmentState env;
  EnvConfig config;
};

inline Snapshot snapshot_from_json(const nlohmann::json& j) {
  if (j.value("format", std::string{}) != "usvnav-environment") {
    throw std::invalid_argument("not an environment snapshot");
  }
  if (j.at("version").get<int>() != 1) throw std::invalid_argument("unsupported snapshot version");
  Snapshot s;
  auto& env = s.env;
  env.seed = j.at("seed").get<std::uint64_t>();
  env.phase = j.at("phase").get<int>();
  const auto& b = j.at("boundary");
  env.boundary = {b.at("lo").get<double>(), b.at("hi").get<double>()};
  env.enforce_boundary = b.at("enforced").get<bool>();
  env.start = {j.at("start").at(0).get<double>(), j.at("start").at(1).get<double>()};
  env.goal = {j.at("goal").at(0).get<double>(), j.at("goal").at(1).get<double>()};
  const auto& r = j.at("robot");
  env.robot.position = {r.at("x").get<double>(), r.at("y").get<double>()};
  env.robot.heading = r.at("heading").get<double>();
  env.robot.steer_speed = r.at("steer_speed").get<double>();
  env.step_count = j.at("step_count").get<int>();
  for (const auto& v : j.at("vortices")) {
    env.vortices.push_back({{v.at("x").get<double>(), v.at("y").get<double>()},
                            v.at("core_radius").get<double>(),
                            v.at("circulation").get<double>()});
  }
  for (const auto& o : j.at("obstacles")) {
    env.obstacles.push_back({{o.at("x").get<double>(), o.at("y").get<double>()}, o.at("radius").get<double>()});
  }
  if (j.contains("config")) s.config = env_config_from_json(j.at("config"));
  return s;
}

inline void save_snapshot(const std::string& path, const EnvironmentState& env, const EnvConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write snapshot: " + path);
  out << snapshot_to_json(env, cfg).dump(2) << '\n';
  if (!out) throw std::runtime_error("failed writing snapshot: " + path);
}

inline Snapshot load_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read snapshot: " + path);
  return snapshot_from_json(nlohmann::json::parse(in));
}

}  // namespace usvnav
