#pragma once

#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "usvnav/nn/dense.hpp"

namespace usvnav::nn {

enum class AgentKind { dqn, iqn };

constexpr std::string_view to_string(AgentKind k) { return k == AgentKind::iqn ? "iqn" : "dqn"; }

inline AgentKind agent_kind_from_string(std::string_view s) {
  if (s == "iqn") return AgentKind::iqn;
  if (s == "dqn") return AgentKind::dqn;
  throw std::invalid_argument("unknown agent kind: " + std::string(s));
}

/// Layer widths. Per-source encoders feed a shared state layer; IQN adds a
/// cosine quantile embedding merged by element-wise product.
struct Topology {
  int lidar_beams = 61;
  int velocity_hidden = 32;
  int goal_hidden = 32;
  int lidar_hidden = 96;
  int state_hidden = 128;
  int cosine_features = 64;
  int head_hidden = 128;
  int actions = 9;

  int input_size() const { return 4 + lidar_beams; }
  bool operator==(const Topology&) const = default;
};

/// Layer order inside Model::layers.
enum LayerIndex : int {
  kVelocityLayer = 0,
  kGoalLayer = 1,
  kLidarLayer = 2,
  kStateLayer = 3,
  // DQN: 4 head hidden, 5 output. IQN: 4 cosine, 5 head hidden, 6 output.
};

/// Observation batch; each column is one sample.
template <class S>
struct Batch {
  Mat<S> velocity;  // 2 x B
  Mat<S> goal;      // 2 x B
  Mat<S> lidar;     // beams x B

  int size() const { return static_cast<int>(velocity.cols()); }

  /// Builds a batch from flat rows laid out as [velocity(2), goal(2), lidar...].
  static Batch from_rows(std::span<const float> flat, int rows, int beams) {
    Batch b;
    b.velocity.resize(2, rows);
    b.goal.resize(2, rows);
    b.lidar.resize(beams, rows);
    const int width = 4 + beams;
    for (int r = 0; r < rows; ++r) {
      const float* row = flat.data() + static_cast<std::ptrdiff_t>(r) * width;
      b.velocity(0, r) = static_cast<S>(row[0]);
      b.velocity(1, r) = static_cast<S>(row[1]);
      b.goal(0, r) = static_cast<S>(row[2]);
      b.goal(1, r) = static_cast<S>(row[3]);
      for (int i = 0; i < beams; ++i) b.lidar(i, r) = static_cast<S>(row[4 + i]);
    }
    return b;
  }
};

/// Cosine quantile features cos(pi * i * phi * tau), i = 0..count-1.
template <class S = double>
std::vector<S> cosine_embed(double tau, double phi, int count = 64) {
  std::vector<S> f(static_cast<std::size_t>(count));
  const double x = phi * tau;
  for (int i = 0; i < count; ++i) f[static_cast<std::size_t>(i)] = static_cast<S>(std::cos(std::numbers::pi * i * x));
  return f;
}

/// Activations recorded by a forward pass, consumed by backward().
template <class S>
struct ForwardCache {
  std::vector<Mat<S>> inputs;   // per layer
  std::vector<Mat<S>> outputs;  // per layer
  Mat<S> state_repeated;        // IQN: state features tiled per quantile
  int quantiles = 1;
};

template <class S>
using Gradients = std::vector<DenseGrad<S>>;

template <class S>
class Model {
 public:
  Model() = default;

  static Model create(AgentKind kind, const Topology& topo, std::uint64_t seed) {
    Model m;
    m.kind_ = kind;
    m.topo_ = topo;
    const int concat = topo.velocity_hidden + topo.goal_hidden + topo.lidar_hidden;
    m.layers_.emplace_back(2, topo.velocity_hidden, Activation::relu);
    m.layers_.emplace_back(2, topo.goal_hidden, Activation::relu);
    m.layers_.emplace_back(topo.lidar_beams, topo.lidar_hidden, Activation::relu);
    m.layers_.emplace_back(concat, topo.state_hidden, Activation::relu);
    if (kind == AgentKind::iqn) m.layers_.emplace_back(topo.cosine_features, topo.state_hidden, Activation::relu);
    m.layers_.emplace_back(topo.state_hidden, topo.head_hidden, Activation::relu);
    m.layers_.emplace_back(topo.head_hidden, topo.actions, Activation::identity);
    Rng rng(seed);
    for (auto& l : m.layers_) l.init_uniform(rng);
    return m;
  }

  /// Assembles a model from explicit layers (checkpoint loading); validates shapes.
  static Model from_layers(AgentKind kind, const Topology& topo, std::vector<Dense<S>> layers) {
    Model ref = create(kind, topo, 0);
    if (layers.size() != ref.layers_.size()) throw std::invalid_argument("layer count does not match topology");
    for (std::size_t i = 0; i < layers.size(); ++i) {
      if (layers[i].in() != ref.layers_[i].in() || layers[i].out() != ref.layers_[i].out() ||
          layers[i].activation != ref.layers_[i].activation) {
        throw std::invalid_argument("layer " + std::to_string(i) + " does not match topology");
      }
    }
    ref.layers_ = std::move(layers);
    return ref;
  }

  AgentKind kind() const { return kind_; }
  const Topology& topology() const { return topo_; }
  std::vector<Dense<S>>& layers() { return layers_; }
  const std::vector<Dense<S>>& layers() const { return layers_; }
  int actions() const { return topo_.actions; }

  int cosine_layer() const { return kind_ == AgentKind::iqn ? 4 : -1; }
  int head_layer() const { return kind_ == AgentKind::iqn ? 5 : 4; }
  int output_layer() const { return kind_ == AgentKind::iqn ? 6 : 5; }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
    return n;
  }

  Gradients<S> zero_gradients() const {
    Gradients<S> g;
    g.reserve(layers_.size());
    for (const auto& l : layers_) g.emplace_back(l);
    return g;
  }

  template <class U>
  Model<U> cast() const {
    std::vector<Dense<U>> ls;
    for (const auto& l : layers_) ls.push_back(l.template cast<U>());
    return Model<U>::from_layers(kind_, topo_, std::move(ls));
  }

  bool operator==(const Model& o) const { return kind_ == o.kind_ && topo_ == o.topo_ && layers_ == o.layers_; }

  // ---- forward -------------------------------------------------------------

  /// DQN action values, actions x B.
  Mat<S> forward_dqn(const Batch<S>& batch, ForwardCache<S>* cache = nullptr) const {
    require(AgentKind::dqn);
    ForwardCache<S> local;
    ForwardCache<S>& c = cache ? *cache : local;
    start(c);
    Mat<S> state = encode_state(batch, c);
    Mat<S> h = run(head_layer(), state, c);
    return run(output_layer(), h, c);
  }

  /// IQN quantile values. `fractions` holds `quantiles` values per sample
  /// (already distorted, i.e. phi * tau), sample-major. Output is
  /// actions x (B * quantiles) with column b * quantiles + n.
  Mat<S> forward_iqn(const Batch<S>& batch, std::span<const S> fractions, int quantiles,
                     ForwardCache<S>* cache = nullptr) const {
    require(AgentKind::iqn);
    const int b = batch.size();
    if (quantiles < 1 || static_cast<int>(fractions.size()) != b * quantiles) {
      throw std::invalid_argument("quantile fraction count does not match batch");
    }
    ForwardCache<S> local;
    ForwardCache<S>& c = cache ? *cache : local;
    start(c);
    c.quantiles = quantiles;
    const Mat<S> state = encode_state(batch, c);

    const int nf = topo_.cosine_features;
    Mat<S> cos_in(nf, b * quantiles);
    for (int col = 0; col < b * quantiles; ++col) {
      const double x = static_cast<double>(fractions[static_cast<std::size_t>(col)]);
      for (int i = 0; i < nf; ++i) cos_in(i, col) = static_cast<S>(std::cos(std::numbers::pi * i * x));
    }
    const Mat<S> embed = run(cosine_layer(), cos_in, c);

    c.state_repeated.resize(state.rows(), b * quantiles);
    for (int s = 0; s < b; ++s) c.state_repeated.middleCols(s * quantiles, quantiles) = state.col(s).replicate(1, quantiles);
    Mat<S> merged = c.state_repeated.cwiseProduct(embed);
    Mat<S> h = run(head_layer(), merged, c);
    return run(output_layer(), h, c);
  }

  // ---- backward ------------------------------------------------------------

  /// Accumulates parameter gradients of sum(d_out .* output) into `grads`.
  void backward(const ForwardCache<S>& c, const Mat<S>& d_out, Gradients<S>& grads) const {
    Mat<S> d = back(output_layer(), c, d_out, grads);
    d = back(head_layer(), c, d, grads);
    Mat<S> d_state;
    if (kind_ == AgentKind::iqn) {
      const int q = c.quantiles;
      const Mat<S>& embed = c.outputs[static_cast<std::size_t>(cosine_layer())];
      const Mat<S> d_embed = d.cwiseProduct(c.state_repeated);
      const Mat<S> d_rep = d.cwiseProduct(embed);
      back(cosine_layer(), c, d_embed, grads, false);
      const int b = static_cast<int>(d_rep.cols()) / q;
      d_state.resize(d_rep.rows(), b);
      for (int s = 0; s < b; ++s) d_state.col(s) = d_rep.middleCols(s * q, q).rowwise().sum();
    } else {
      d_state = std::move(d);
    }
    const Mat<S> d_concat = back(kStateLayer, c, d_state, grads);
    const int v = topo_.velocity_hidden, g = topo_.goal_hidden, l = topo_.lidar_hidden;
    back(kVelocityLayer, c, d_concat.topRows(v), grads, false);
    back(kGoalLayer, c, d_concat.middleRows(v, g), grads, false);
    back(kLidarLayer, c, d_concat.bottomRows(l), grads, false);
  }

 private:
  void require(AgentKind k) const {
    if (kind_ != k) throw std::logic_error("forward pass called on a model of the other agent kind");
  }

  void start(ForwardCache<S>& c) const {
    c.inputs.assign(layers_.size(), Mat<S>());
    c.outputs.assign(layers_.size(), Mat<S>());
  }

  Mat<S> run(int idx, const Mat<S>& x, ForwardCache<S>& c) const {
    const auto i = static_cast<std::size_t>(idx);
    if (x.rows() != layers_[i].in()) throw std::invalid_argument("input size mismatch at layer " + std::to_string(idx));
    c.inputs[i] = x;
    c.outputs[i] = layers_[i].forward(x);
    return c.outputs[i];
  }

  Mat<S> back(int idx, const ForwardCache<S>& c, const Mat<S>& dy, Gradients<S>& grads, bool need_input = true) const {
    const auto i = static_cast<std::size_t>(idx);
    return dense_backward(layers_[i], c.inputs[i], c.outputs[i], dy, grads[i], need_input);
  }

  Mat<S> encode_state(const Batch<S>& batch, ForwardCache<S>& c) const {
    const Mat<S> v = run(kVelocityLayer, batch.velocity, c);
    const Mat<S> g = run(kGoalLayer, batch.goal, c);
    const Mat<S> l = run(kLidarLayer, batch.lidar, c);
    Mat<S> concat(v.rows() + g.rows() + l.rows(), batch.size());
    concat << v, g, l;
    return run(kStateLayer, concat, c);
  }

  AgentKind kind_ = AgentKind::dqn;
  Topology topo_;
  std::vector<Dense<S>> layers_;
};

}  // namespace usvnav::nn
