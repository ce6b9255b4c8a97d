#pragma once

#include <cmath>
#include <vector>

#include "usvnav/rl/replay_buffer.hpp"
#include "usvnav/rl/risk.hpp"

namespace usvnav::rl {

/// Huber function L_kappa(u).
template <class S>
S huber(S u, S kappa) {
  const S a = std::abs(u);
  return a <= kappa ? S(0.5) * u * u : kappa * (a - S(0.5) * kappa);
}

/// Quantile Huber loss rho^kappa_tau(u) = |tau - 1{u<0}| L_kappa(u) / kappa.
template <class S>
S quantile_huber(S u, S tau, S kappa) {
  const S weight = std::abs(tau - (u < S(0) ? S(1) : S(0)));
  return weight * huber(u, kappa) / kappa;
}

/// d rho / d u (the indicator is treated as constant).
template <class S>
S quantile_huber_derivative(S u, S tau, S kappa) {
  const S weight = std::abs(tau - (u < S(0) ? S(1) : S(0)));
  const S dh = std::abs(u) <= kappa ? u : (u > S(0) ? kappa : -kappa);
  return weight * dh / kappa;
}

template <class S>
struct LossResult {
  S loss = S(0);
  nn::Gradients<S> grads;
};

/// Mean squared TD error (r + gamma max_a' Q_target(s',a') - Q(s,a))^2.
template <class S>
LossResult<S> dqn_loss(const nn::Model<S>& online, const nn::Model<S>& target, const TransitionBatch<S>& batch,
                       S gamma) {
  const int b = batch.size();
  nn::ForwardCache<S> cache;
  const nn::Mat<S> q = online.forward_dqn(batch.observations, &cache);
  const nn::Mat<S> q_next = target.forward_dqn(batch.next_observations);
  nn::Mat<S> d_out = nn::Mat<S>::Zero(q.rows(), q.cols());
  LossResult<S> res;
  for (int i = 0; i < b; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    const S bootstrap = (S(1) - batch.terminal[iu]) * gamma * q_next.col(i).maxCoeff();
    const S td = batch.rewards[iu] + bootstrap - q(batch.actions[iu], i);
    res.loss += td * td;
    d_out(batch.actions[iu], i) = S(-2) * td / static_cast<S>(b);
  }
  res.loss /= static_cast<S>(b);
  res.grads = online.zero_gradients();
  online.backward(cache, d_out, res.grads);
  return res;
}

/// Quantile fractions drawn for one IQN update, sample-major.
struct IqnSamples {
  int n = 8;         // online fractions per sample
  int n_target = 8;  // target fractions per sample
  int k = 32;        // fractions for the next-action policy
  std::vector<double> taus;         // B * n
  std::vector<double> target_taus;  // B * n_target
  std::vector<double> policy_taus;  // B * k, undistorted

  static IqnSamples draw(Rng& rng, int batch, int n, int n_target, int k) {
    IqnSamples s{n, n_target, k, {}, {}, {}};
    auto fill = [&](std::vector<double>& v, int count) {
      v.resize(static_cast<std::size_t>(batch * count));
      for (auto& x : v) x = rng.uniform01();
    };
    fill(s.taus, n);
    fill(s.target_taus, n_target);
    fill(s.policy_taus, k);
    return s;
  }
};

struct IqnLossOptions {
  double gamma = 0.99;
  double kappa = 1.0;
  double phi_target = 1.0;  // CVaR level of the next-action policy
};

/// IQN loss averaged over the batch:
///   (1/N') sum_i sum_j rho^kappa_{tau_i}(r + gamma Z'_{tau'_j}(s', a*) - Z_{tau_i}(s, a))
/// with a* the CVaR(phi_target) policy of the online network at s' and Z'
/// from the target network.
template <class S>
LossResult<S> iqn_loss(const nn::Model<S>& online, const nn::Model<S>& target, const TransitionBatch<S>& batch,
                       const IqnSamples& samples, const IqnLossOptions& opt) {
  const int b = batch.size();
  const int n = samples.n, nt = samples.n_target, k = samples.k;
  const S gamma = static_cast<S>(opt.gamma), kappa = static_cast<S>(opt.kappa);

  std::vector<S> policy_f(samples.policy_taus.size());
  for (std::size_t i = 0; i < policy_f.size(); ++i) policy_f[i] = static_cast<S>(cvar_distort(samples.policy_taus[i], opt.phi_target));
  const nn::Mat<S> z_policy = online.forward_iqn(batch.next_observations, policy_f, k);

  std::vector<S> target_f(samples.target_taus.begin(), samples.target_taus.end());
  const nn::Mat<S> z_target = target.forward_iqn(batch.next_observations, target_f, nt);

  std::vector<S> online_f(samples.taus.begin(), samples.taus.end());
  nn::ForwardCache<S> cache;
  const nn::Mat<S> z = online.forward_iqn(batch.observations, online_f, n, &cache);

  nn::Mat<S> d_out = nn::Mat<S>::Zero(z.rows(), z.cols());
  LossResult<S> res;
  const S inv_nt = S(1) / static_cast<S>(nt);
  const S inv_b = S(1) / static_cast<S>(b);
  std::vector<S> targets(static_cast<std::size_t>(nt));
  for (int s = 0; s < b; ++s) {
    const auto su = static_cast<std::size_t>(s);
    std::vector<double> mean(static_cast<std::size_t>(z_policy.rows()), 0.0);
    for (Eigen::Index a = 0; a < z_policy.rows(); ++a) {
      mean[static_cast<std::size_t>(a)] = static_cast<double>(z_policy.row(a).segment(s * k, k).sum()) / k;
    }
    const int a_next = argmax_lowest(mean);
    const S not_done = S(1) - batch.terminal[su];
    for (int j = 0; j < nt; ++j) {
      targets[static_cast<std::size_t>(j)] = batch.rewards[su] + not_done * gamma * z_target(a_next, s * nt + j);
    }
    const int a = batch.actions[su];
    for (int i = 0; i < n; ++i) {
      const int col = s * n + i;
      const S tau = online_f[static_cast<std::size_t>(col)];
      const S pred = z(a, col);
      S grad = S(0);
      for (int j = 0; j < nt; ++j) {
        const S u = targets[static_cast<std::size_t>(j)] - pred;
        res.loss += quantile_huber(u, tau, kappa) * inv_nt * inv_b;
        grad -= quantile_huber_derivative(u, tau, kappa);
      }
      d_out(a, col) = grad * inv_nt * inv_b;
    }
  }
  res.grads = online.zero_gradients();
  online.backward(cache, d_out, res.grads);
  return res;
}

}  // namespace usvnav::rl
