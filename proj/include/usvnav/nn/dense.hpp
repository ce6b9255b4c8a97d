#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string_view>

#include "usvnav/core/random.hpp"

namespace usvnav::nn {

template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

enum class Activation { identity, relu };

constexpr std::string_view to_string(Activation a) { return a == Activation::relu ? "relu" : "identity"; }

/// Fully connected layer y = act(W x + b); samples are columns.
template <class S>
struct Dense {
  Mat<S> weight;  // out x in
  Vec<S> bias;    // out
  Activation activation = Activation::identity;

  Dense() = default;
  Dense(int in, int out, Activation act) : weight(Mat<S>::Zero(out, in)), bias(Vec<S>::Zero(out)), activation(act) {}

  int in() const { return static_cast<int>(weight.cols()); }
  int out() const { return static_cast<int>(weight.rows()); }

  /// Uniform He-style init: W ~ U(-sqrt(6/fan_in), sqrt(6/fan_in)), b = 0.
  void init_uniform(Rng& rng) {
    const double bound = std::sqrt(6.0 / in());
    for (Eigen::Index c = 0; c < weight.cols(); ++c) {
      for (Eigen::Index r = 0; r < weight.rows(); ++r) weight(r, c) = static_cast<S>(rng.uniform(-bound, bound));
    }
    bias.setZero();
  }

  Mat<S> forward(const Mat<S>& x) const {
    Mat<S> y = weight * x;
    y.colwise() += bias;
    if (activation == Activation::relu) y = y.cwiseMax(S(0));
    return y;
  }

  template <class U>
  Dense<U> cast() const {
    Dense<U> d;
    d.weight = weight.template cast<U>();
    d.bias = bias.template cast<U>();
    d.activation = activation;
    return d;
  }

  bool operator==(const Dense& o) const {
    return activation == o.activation && weight.rows() == o.weight.rows() && weight.cols() == o.weight.cols() &&
           weight == o.weight && bias == o.bias;
  }
};

template <class S>
struct DenseGrad {
  Mat<S> weight;
  Vec<S> bias;

  explicit DenseGrad(const Dense<S>& layer)
      : weight(Mat<S>::Zero(layer.weight.rows(), layer.weight.cols())), bias(Vec<S>::Zero(layer.bias.size())) {}
};

/// Backpropagates `dy` (gradient at the layer output) through `layer`, given
/// the forward input `x` and output `y`. Accumulates into `grad` and returns
/// the gradient with respect to `x`.
template <class S>
Mat<S> dense_backward(const Dense<S>& layer, const Mat<S>& x, const Mat<S>& y, Mat<S> dy, DenseGrad<S>& grad,
                      bool need_input_grad = true) {
  if (layer.activation == Activation::relu) dy = dy.cwiseProduct((y.array() > S(0)).template cast<S>().matrix());
  grad.weight.noalias() += dy * x.transpose();
  grad.bias += dy.rowwise().sum();
  if (!need_input_grad) return {};
  return layer.weight.transpose() * dy;
}

}  // namespace usvnav::nn
