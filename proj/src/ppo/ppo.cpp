#include "hire/ppo/ppo.hpp"

#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace hire {

void PpoConfig::validate() const {
  if (rollout_len <= 0 || n_envs <= 0)
    throw std::invalid_argument("rollout dimensions must be positive");
  if (minibatch <= 0 || minibatch > rollout_len * n_envs)
    throw std::invalid_argument("minibatch must fit inside one rollout");
  if (epochs <= 0) throw std::invalid_argument("epochs must be positive");
  if (!(lr > 0.0)) throw std::invalid_argument("learning rate must be > 0");
  if (!(clip_range > 0.0)) throw std::invalid_argument("clip range must be > 0");
  if (gamma < 0.0 || gamma > 1.0 || gae_lambda < 0.0 || gae_lambda > 1.0)
    throw std::invalid_argument("gamma and lambda must lie in [0, 1]");
  if (total_steps <= 0)
    throw std::invalid_argument("total steps must be positive");
  if (hidden.empty())
    throw std::invalid_argument("at least one hidden layer required");
}

void compute_gae(Rollout& r, double gamma, double lambda) {
  for (int e = 0; e < r.E; ++e) {
    double adv = 0.0;
    for (int t = r.T - 1; t >= 0; --t) {
      double mask = 1.0 - r.dones(t, e);
      double delta = r.combined(t, e) + gamma * r.values(t + 1, e) * mask -
                     r.values(t, e);
      adv = delta + gamma * lambda * mask * adv;
      r.advantages(t, e) = adv;
      r.returns(t, e) = adv + r.values(t, e);
    }
  }
}

PpoLearner::PpoLearner(int obs_dim, int n_actions, const PpoConfig& cfg,
                       uint64_t seed)
    : net(make_actor_critic<float>(obs_dim, n_actions, cfg.hidden, seed)),
      cfg_(cfg),
      opt_trunk_(net.trunk, cfg.lr),
      opt_pi_(net.pi_head, cfg.lr),
      opt_v_(net.v_head, cfg.lr) {
  cfg.validate();
}

PpoUpdateStats PpoLearner::update(const Rollout& r, Rng& rng) {
  const int N = r.T * r.E;
  std::vector<int> order(N);
  std::iota(order.begin(), order.end(), 0);

  PpoUpdateStats out;
  for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
    for (int i = N - 1; i > 0; --i) {
      int j = static_cast<int>(rng.uniform_int(0, i));
      std::swap(order[i], order[j]);
    }
    for (int start = 0; start < N; start += cfg_.minibatch) {
      const int m = std::min(cfg_.minibatch, N - start);
      PpoMinibatch<float> mb;
      mb.obs.resize(r.obs.rows(), m);
      mb.actions.resize(m);
      mb.old_logp.resize(m);
      mb.old_values.resize(m);
      mb.advantages.resize(m);
      mb.returns.resize(m);
      for (int i = 0; i < m; ++i) {
        int n = order[start + i];
        int t = n / r.E, e = n % r.E;
        mb.obs.col(i) = r.obs.col(n).cast<float>();
        mb.actions(i) = r.actions(t, e);
        mb.old_logp(i) = static_cast<float>(r.logprobs(t, e));
        mb.old_values(i) = static_cast<float>(r.values(t, e));
        mb.advantages(i) = static_cast<float>(r.advantages(t, e));
        mb.returns(i) = static_cast<float>(r.returns(t, e));
      }
      // normalize advantages within the minibatch
      double mu = mb.advantages.cast<double>().mean();
      double sq = 0.0;
      for (int i = 0; i < m; ++i) {
        double d = mb.advantages(i) - mu;
        sq += d * d;
      }
      double sd = std::sqrt(sq / m) + 1e-8;
      for (int i = 0; i < m; ++i)
        mb.advantages(i) = static_cast<float>((mb.advantages(i) - mu) / sd);

      AcGradients<float> g;
      PpoLossStats st = ppo_loss(net, mb, cfg_, &g);
      if (!std::isfinite(st.total)) {
        std::fprintf(stderr,
                     "ppo: non-finite loss (policy %g value %g entropy %g), "
                     "aborting iteration\n",
                     st.policy, st.value, st.entropy);
        out.aborted = true;
        return out;
      }
      double norm = clip_grad_norm<float>({&g.trunk, &g.pi, &g.v},
                                          cfg_.max_grad_norm);
      opt_trunk_.step(net.trunk, g.trunk);
      opt_pi_.step(net.pi_head, g.pi);
      opt_v_.step(net.v_head, g.v);

      out.policy_loss += st.policy;
      out.value_loss += st.value;
      out.entropy += st.entropy;
      out.clip_frac += st.clip_frac;
      out.approx_kl += st.approx_kl;
      out.grad_norm += norm;
      ++out.minibatches;
    }
  }
  if (out.minibatches > 0) {
    out.policy_loss /= out.minibatches;
    out.value_loss /= out.minibatches;
    out.entropy /= out.minibatches;
    out.clip_frac /= out.minibatches;
    out.approx_kl /= out.minibatches;
    out.grad_norm /= out.minibatches;
  }
  return out;
}

}  // namespace hire
