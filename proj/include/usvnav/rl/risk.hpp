#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "usvnav/core/random.hpp"
#include "usvnav/nn/model.hpp"
#include "usvnav/sensing/observation.hpp"

namespace usvnav::rl {

/// CVaR distortion of a quantile fraction: f(tau; phi) = phi * tau.
constexpr double cvar_distort(double tau, double phi) { return phi * tau; }

/// Risk level from the nearest detected obstacle: its distance over d0 when
/// something is within range, 1.0 (risk neutral) otherwise.
inline double adaptive_phi(std::span<const Vec2> reflections, Vec2 robot_position, double d0) {
  double nearest = std::numeric_limits<double>::infinity();
  for (const Vec2 p : reflections) nearest = std::min(nearest, distance(p, robot_position));
  if (nearest <= d0) return nearest / d0;
  return 1.0;
}

/// Same rule on raw LiDAR ranges (a beam's range is its reflection distance).
inline double adaptive_phi(const Observation& obs, double d0) {
  double nearest = std::numeric_limits<double>::infinity();
  for (double r : obs.lidar) nearest = std::min(nearest, r);
  if (nearest <= d0) return nearest / d0;
  return 1.0;
}

/// Index of the largest entry; ties go to the lowest index.
template <class Range>
int argmax_lowest(const Range& values) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i) {
    if (values[static_cast<std::size_t>(i)] > values[static_cast<std::size_t>(best)]) best = i;
  }
  return best;
}

/// Chooses the action maximizing the sample mean of quantile values at the
/// given (already distorted) fractions. `quantiles(fractions)` must return an
/// actions x fractions.size() matrix.
template <class QuantileFn>
int select_action_from_fractions(QuantileFn&& quantiles, std::span<const double> fractions) {
  const auto z = quantiles(fractions);
  std::vector<double> mean(static_cast<std::size_t>(z.rows()), 0.0);
  for (Eigen::Index a = 0; a < z.rows(); ++a) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < z.cols(); ++k) s += static_cast<double>(z(a, k));
    mean[static_cast<std::size_t>(a)] = s / static_cast<double>(z.cols());
  }
  return argmax_lowest(mean);
}

/// Draws K fractions tau ~ U[0,1) and distorts them with CVaR(phi).
inline std::vector<double> sample_distorted_fractions(Rng& rng, int k, double phi) {
  std::vector<double> f(static_cast<std::size_t>(k));
  for (auto& x : f) x = cvar_distort(rng.uniform01(), phi);
  return f;
}

/// Quantile evaluator over one encoded observation for a network model.
template <class S>
auto network_quantiles(const nn::Model<S>& model, const EncodedObservation& obs) {
  const auto batch = nn::Batch<S>::from_rows(obs.flat(), 1, model.topology().lidar_beams);
  return [&model, batch](std::span<const double> fractions) {
    std::vector<S> f(fractions.begin(), fractions.end());
    return model.forward_iqn(batch, f, static_cast<int>(f.size()));
  };
}

/// Risk-sensitive IQN policy: argmax_a (1/K) sum_k Z_{phi tau_k}(s, a).
template <class S>
int select_action_iqn(const nn::Model<S>& model, const EncodedObservation& obs, double phi, int k, Rng& rng) {
  const auto fractions = sample_distorted_fractions(rng, std::max(k, 1), phi);
  return select_action_from_fractions(network_quantiles(model, obs), fractions);
}

template <class S>
int select_action_dqn(const nn::Model<S>& model, const EncodedObservation& obs) {
  const auto batch = nn::Batch<S>::from_rows(obs.flat(), 1, model.topology().lidar_beams);
  const nn::Mat<S> q = model.forward_dqn(batch);
  std::vector<double> v(static_cast<std::size_t>(q.rows()));
  for (Eigen::Index a = 0; a < q.rows(); ++a) v[static_cast<std::size_t>(a)] = static_cast<double>(q(a, 0));
  return argmax_lowest(v);
}

}  // namespace usvnav::rl
