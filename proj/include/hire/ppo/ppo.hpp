#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "hire/nn/mlp.hpp"
#include "hire/rollout.hpp"
#include "hire/util/rng.hpp"

namespace hire {

struct PpoConfig {
  int rollout_len = 32;
  int n_envs = 16;
  double lr = 2.5e-4;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  double clip_range = 0.1;
  double max_grad_norm = 0.5;
  int epochs = 4;
  int minibatch = 64;
  int64_t total_steps = 500000;
  std::vector<int> hidden = {128, 128};

  void validate() const;
};

// Shared ReLU trunk with a policy head and a value head.
template <typename S>
struct ActorCritic {
  MlpParams<S> trunk, pi_head, v_head;

  int obs_dim() const { return trunk.in_dim(); }
  int n_actions() const { return pi_head.out_dim(); }

  template <typename T>
  ActorCritic<T> cast() const {
    auto conv = [](const MlpParams<S>& p) {
      MlpParams<T> q;
      for (int l = 0; l < p.n_layers(); ++l) {
        q.W.push_back(p.W[l].template cast<T>());
        q.b.push_back(p.b[l].template cast<T>());
        q.act.push_back(p.act[l]);
      }
      return q;
    };
    return {conv(trunk), conv(pi_head), conv(v_head)};
  }
};

template <typename S>
struct AcGradients {
  Gradients<S> trunk, pi, v;
};

// Orthogonal init: sqrt(2) through the trunk, 0.01 on the policy head so
// early action distributions stay near uniform, 1 on the value head.
template <typename S>
ActorCritic<S> make_actor_critic(int obs_dim, int n_actions,
                                 const std::vector<int>& hidden,
                                 uint64_t seed) {
  if (hidden.empty())
    throw std::invalid_argument("actor-critic needs a hidden layer");
  ActorCritic<S> net;
  std::vector<int> dims = {obs_dim};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  std::vector<Act> acts(hidden.size(), Act::ReLU);
  Rng r1(derive_seed(seed, 0)), r2(derive_seed(seed, 1)),
      r3(derive_seed(seed, 2));
  net.trunk = orthogonal_init<S>(dims, acts, 1.4142135623730951, r1);
  net.pi_head = make_mlp<S>({hidden.back(), n_actions}, {Act::Identity},
                            {0.01}, r2);
  net.v_head = make_mlp<S>({hidden.back(), 1}, {Act::Identity}, {1.0}, r3);
  return net;
}

// Logits and values for a batch of observation columns.
template <typename S>
void policy_value(const ActorCritic<S>& net, const Mat<S>& obs,
                  Mat<S>* logits = nullptr, Mat<S>* values = nullptr) {
  Mat<S> h = forward(net.trunk, obs);
  if (logits) *logits = forward(net.pi_head, h);
  if (values) *values = forward(net.v_head, h);
}

// Categorical sample from logits, probabilities computed in double. Fills
// logprob with log pi(a) and entropy with -sum p log p when requested.
template <typename S>
int sample_categorical(const Vec<S>& logits, Rng& rng,
                       double* logprob = nullptr, double* entropy = nullptr) {
  const int n = static_cast<int>(logits.size());
  Eigen::VectorXd z = logits.template cast<double>();
  if (!z.allFinite()) throw std::runtime_error("non-finite policy logits");
  double mx = z.maxCoeff();
  Eigen::VectorXd p = (z.array() - mx).exp();
  double total = p.sum();
  p /= total;

  double u = rng.uniform();
  int a = n - 1;
  double cum = 0.0;
  for (int i = 0; i < n; ++i) {
    cum += p(i);
    if (u < cum) {
      a = i;
      break;
    }
  }
  if (logprob) *logprob = z(a) - mx - std::log(total);
  if (entropy) {
    double h = 0.0;
    for (int i = 0; i < n; ++i)
      if (p(i) > 0.0) h -= p(i) * std::log(p(i));
    *entropy = h;
  }
  return a;
}

// GAE over the combined rewards: delta_t = r_t + gamma*V_{t+1}*(1-done) - V_t,
// A_t = delta_t + gamma*lambda*(1-done)*A_{t+1}, returns = A + V. Truncated
// episodes count as boundaries; there is no truncation bootstrap.
void compute_gae(Rollout& r, double gamma, double lambda);

template <typename S>
struct PpoMinibatch {
  Mat<S> obs;                 // obs_dim x m
  Eigen::VectorXi actions;    // m
  Vec<S> old_logp;            // m
  Vec<S> old_values;          // m
  Vec<S> advantages;          // m, already normalized
  Vec<S> returns;             // m
  int size() const { return static_cast<int>(actions.size()); }
};

struct PpoLossStats {
  double total = 0.0, policy = 0.0, value = 0.0, entropy = 0.0;
  double clip_frac = 0.0, approx_kl = 0.0;
};

// Clipped-surrogate loss with value clipping and an entropy bonus:
//   L = -min(rho*A, clip(rho, 1-eps, 1+eps)*A)
//       + value_coef * 0.5 * max((V-R)^2, (Vclip-R)^2)
//       - entropy_coef * H
// averaged over the minibatch. Fills parameter gradients when grads is
// non-null. The whole computation runs at precision S so the double
// instantiation can be checked against finite differences.
template <typename S>
PpoLossStats ppo_loss(const ActorCritic<S>& net, const PpoMinibatch<S>& mb,
                      const PpoConfig& cfg, AcGradients<S>* grads = nullptr) {
  const int m = mb.size();
  const int na = net.n_actions();
  const S eps = static_cast<S>(cfg.clip_range);

  ForwardCache<S> c_trunk, c_pi, c_v;
  Mat<S> h = forward(net.trunk, mb.obs, grads ? &c_trunk : nullptr);
  Mat<S> logits = forward(net.pi_head, h, grads ? &c_pi : nullptr);
  Mat<S> values = forward(net.v_head, h, grads ? &c_v : nullptr);

  Mat<S> dlogits = Mat<S>::Zero(na, m);
  Mat<S> dvalues = Mat<S>::Zero(1, m);
  PpoLossStats st;
  S policy_acc = 0, value_acc = 0, entropy_acc = 0;
  int clipped = 0;
  double kl_acc = 0.0;

  for (int j = 0; j < m; ++j) {
    // softmax at precision S
    Vec<S> z = logits.col(j);
    S mx = z.maxCoeff();
    Vec<S> p = (z.array() - mx).exp();
    S total = p.sum();
    p /= total;
    const int a = mb.actions(j);
    S logp = z(a) - mx - std::log(total);

    S ratio = std::exp(logp - mb.old_logp(j));
    S adv = mb.advantages(j);
    S u1 = ratio * adv;
    S u2 = std::clamp(ratio, S(1) - eps, S(1) + eps) * adv;
    policy_acc += -std::min(u1, u2);
    if (std::abs(ratio - S(1)) > eps) ++clipped;
    kl_acc += static_cast<double>(mb.old_logp(j) - logp);

    S entropy = 0;
    for (int i = 0; i < na; ++i)
      if (p(i) > S(0)) entropy -= p(i) * std::log(p(i));
    entropy_acc += entropy;

    S v = values(0, j), vo = mb.old_values(j), ret = mb.returns(j);
    S vc = vo + std::clamp(v - vo, -eps, eps);
    S e1 = v - ret, e2 = vc - ret;
    value_acc += S(0.5) * std::max(e1 * e1, e2 * e2);

    if (grads) {
      // policy: gradient flows only through the unclipped branch of the min
      S dlogp = u1 <= u2 ? -adv * ratio / S(m) : S(0);
      for (int i = 0; i < na; ++i) dlogits(i, j) = -dlogp * p(i);
      dlogits(a, j) += dlogp;
      // entropy bonus: d(-H)/dz_i = p_i*(log p_i + H)
      S ec = static_cast<S>(cfg.entropy_coef) / S(m);
      for (int i = 0; i < na; ++i)
        if (p(i) > S(0))
          dlogits(i, j) += ec * p(i) * (std::log(p(i)) + entropy);
      // value: the max picks its branch; a selected clipped branch has a
      // saturated clamp, so its derivative is zero
      dvalues(0, j) = e1 * e1 >= e2 * e2
                          ? static_cast<S>(cfg.value_coef) * e1 / S(m)
                          : S(0);
    }
  }

  st.policy = static_cast<double>(policy_acc) / m;
  st.value = static_cast<double>(value_acc) / m;
  st.entropy = static_cast<double>(entropy_acc) / m;
  st.total = st.policy + cfg.value_coef * st.value -
             cfg.entropy_coef * st.entropy;
  st.clip_frac = static_cast<double>(clipped) / m;
  st.approx_kl = kl_acc / m;

  if (grads) {
    Mat<S> dh_pi, dh_v;
    grads->pi = backward(net.pi_head, c_pi, dlogits, &dh_pi);
    grads->v = backward(net.v_head, c_v, dvalues, &dh_v);
    grads->trunk = backward(net.trunk, c_trunk, Mat<S>(dh_pi + dh_v));
  }
  return st;
}

struct PpoUpdateStats {
  double policy_loss = 0.0, value_loss = 0.0, entropy = 0.0;
  double clip_frac = 0.0, approx_kl = 0.0, grad_norm = 0.0;
  int minibatches = 0;
  bool aborted = false;
};

// Owns the float net and its optimizers; runs the epochs-by-minibatches
// update schedule over a finished rollout. Reads only the combined reward
// column, never the candidate that produced it.
class PpoLearner {
 public:
  PpoLearner(int obs_dim, int n_actions, const PpoConfig& cfg, uint64_t seed);

  ActorCritic<float> net;

  PpoUpdateStats update(const Rollout& r, Rng& rng);

  const PpoConfig& config() const { return cfg_; }
  Adam<float>& opt_trunk() { return opt_trunk_; }
  Adam<float>& opt_pi() { return opt_pi_; }
  Adam<float>& opt_v() { return opt_v_; }

 private:
  PpoConfig cfg_;
  Adam<float> opt_trunk_, opt_pi_, opt_v_;
};

}  // namespace hire
