#pragma once

#include <cmath>
#include <vector>

#include "usvnav/nn/model.hpp"

namespace usvnav::nn {

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Bias-corrected Adam moments for every layer of a model.
template <class S>
struct AdamState {
  AdamConfig config;
  std::vector<DenseGrad<S>> first;
  std::vector<DenseGrad<S>> second;
  long long step = 0;

  AdamState() = default;
  AdamState(const Model<S>& model, AdamConfig cfg) : config(cfg), first(model.zero_gradients()), second(model.zero_gradients()) {}
};

template <class S>
void adam_step(Model<S>& model, const Gradients<S>& grads, AdamState<S>& state) {
  const auto& c = state.config;
  ++state.step;
  const S b1 = static_cast<S>(c.beta1), b2 = static_cast<S>(c.beta2);
  const S corr1 = static_cast<S>(1.0 - std::pow(c.beta1, static_cast<double>(state.step)));
  const S corr2 = static_cast<S>(1.0 - std::pow(c.beta2, static_cast<double>(state.step)));
  const S lr = static_cast<S>(c.learning_rate), eps = static_cast<S>(c.epsilon);

  auto update = [&](auto& param, const auto& g, auto& m, auto& v) {
    m = b1 * m + (S(1) - b1) * g;
    v = b2 * v + (S(1) - b2) * g.cwiseProduct(g);
    param.array() -= lr * (m.array() / corr1) / ((v.array() / corr2).sqrt() + eps);
  };
  auto& layers = model.layers();
  for (std::size_t i = 0; i < layers.size(); ++i) {
    update(layers[i].weight, grads[i].weight, state.first[i].weight, state.second[i].weight);
    update(layers[i].bias, grads[i].bias, state.first[i].bias, state.second[i].bias);
  }
}

}  // namespace usvnav::nn
