#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "usvnav/nn/checkpoint.hpp"
#include "usvnav/planners/apf.hpp"
#include "usvnav/planners/bug.hpp"
#include "usvnav/planners/learned.hpp"

namespace usvnav {

/// Parsed planner name: apf, ba, dqn, iqn:<phi> or iqn:adaptive.
struct PlannerSpec {
  std::string kind;           // apf | ba | dqn | iqn
  std::optional<double> phi;  // iqn only; empty = adaptive

  bool needs_checkpoint() const { return kind == "dqn" || kind == "iqn"; }
  std::string label() const {
    if (kind != "iqn") return kind;
    return phi ? "iqn:" + format_phi(*phi) : "iqn:adaptive";
  }

  static std::string format_phi(double phi) {
    std::string s = std::to_string(phi);
    while (s.size() > 1 && s.back() == '0') s.pop_back();
    if (s.back() == '.') s += '0';
    return s;
  }
};

inline PlannerSpec parse_planner_spec(const std::string& text) {
  if (text == "apf" || text == "ba" || text == "dqn") return {text, std::nullopt};
  if (text == "iqn") return {"iqn", 1.0};
  if (text.rfind("iqn:", 0) == 0) {
    const std::string arg = text.substr(4);
    if (arg == "adaptive") return {"iqn", std::nullopt};
    std::size_t used = 0;
    double phi = 0.0;
    try {
      phi = std::stod(arg, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != arg.size() || !(phi > 0.0 && phi <= 1.0)) {
      throw std::invalid_argument("iqn CVaR threshold must be in (0, 1] or 'adaptive': " + text);
    }
    return {"iqn", phi};
  }
  throw std::invalid_argument("unknown planner: " + text + " (expected apf, ba, dqn, iqn:<phi>, iqn:adaptive)");
}

/// Factory for the planner; learned planners require a matching checkpoint.
inline PlannerFactory make_planner_factory(const PlannerSpec& spec, const std::optional<nn::Checkpoint>& ck,
                                           const SensorConfig& sensor, double v_max, int iqn_samples = 32) {
  if (spec.kind == "apf") return [sensor] { return std::make_unique<ApfPlanner>(sensor); };
  if (spec.kind == "ba") {
    BugParams bp;
    bp.v_max = v_max;
    return [sensor, bp] { return std::make_unique<BugPlanner>(sensor, bp); };
  }
  if (!ck) throw std::invalid_argument("planner " + spec.label() + " needs a checkpoint");
  const auto want = spec.kind == "iqn" ? nn::AgentKind::iqn : nn::AgentKind::dqn;
  if (ck->kind != want) {
    throw std::invalid_argument("checkpoint holds a " + std::string(to_string(ck->kind)) + " model, planner " +
                                spec.label() + " needs " + std::string(to_string(want)));
  }
  if (ck->model.topology().lidar_beams != sensor.beam_count) {
    throw std::invalid_argument("checkpoint LiDAR width does not match the sensor configuration");
  }
  auto model = std::make_shared<const nn::Model<float>>(ck->model);
  if (want == nn::AgentKind::iqn) {
    const auto phi = spec.phi;
    return [model, phi, sensor, iqn_samples] { return std::make_unique<IqnPlanner>(model, phi, sensor, iqn_samples); };
  }
  return [model, sensor] { return std::make_unique<DqnPlanner>(model, sensor); };
}

}  // namespace usvnav
