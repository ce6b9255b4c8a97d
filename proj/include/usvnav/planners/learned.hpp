#pragma once

#include <memory>
#include <optional>
#include <sstream>

#include "usvnav/nn/model.hpp"
#include "usvnav/planners/planner.hpp"
#include "usvnav/rl/risk.hpp"

namespace usvnav {

/// IQN planner with a fixed CVaR threshold, or the adaptive rule when `phi`
/// is empty.
class IqnPlanner final : public Planner {
 public:
  IqnPlanner(std::shared_ptr<const nn::Model<float>> model, std::optional<double> phi, SensorConfig sensor = {},
             int samples = 32)
      : model_(std::move(model)), phi_(phi), sensor_(sensor), samples_(samples) {}

  void reset(std::uint64_t seed) override { rng_ = Rng(seed); }

  Action act(const Observation& obs, const RobotState&, double) override {
    last_phi_ = phi_ ? *phi_ : rl::adaptive_phi(obs, sensor_.range);
    return action_from_index(rl::select_action_iqn(*model_, encode(obs, sensor_), last_phi_, samples_, rng_));
  }
  double last_phi() const override { return last_phi_; }
  std::string name() const override {
    if (!phi_) return "iqn:adaptive";
    std::ostringstream s;
    s << "iqn:" << *phi_;
    return s.str();
  }

 private:
  std::shared_ptr<const nn::Model<float>> model_;
  std::optional<double> phi_;
  SensorConfig sensor_;
  int samples_;
  Rng rng_{0};
  double last_phi_ = 1.0;
};

class DqnPlanner final : public Planner {
 public:
  explicit DqnPlanner(std::shared_ptr<const nn::Model<float>> model, SensorConfig sensor = {})
      : model_(std::move(model)), sensor_(sensor) {}

  Action act(const Observation& obs, const RobotState&, double) override {
    return action_from_index(rl::select_action_dqn(*model_, encode(obs, sensor_)));
  }
  std::string name() const override { return "dqn"; }

 private:
  std::shared_ptr<const nn::Model<float>> model_;
  SensorConfig sensor_;
};

}  // namespace usvnav
