#include "hire/rewards/icm.hpp"

#include <cmath>
#include <cstdio>

#include "hire/rewards/common.hpp"

namespace hire {

namespace {

MlpParams<float> build_net(const std::vector<int>& dims,
                           const std::vector<Act>& acts,
                           const std::vector<double>& gains, uint64_t seed) {
  Rng rng(seed);
  return make_mlp<float>(dims, acts, gains, rng);
}

constexpr double kReluGain = 1.4142135623730951;

}  // namespace

Icm::Icm(int obs_dim, int n_actions, const IcmConfig& cfg, uint64_t seed)
    : psi(build_net({obs_dim, cfg.hidden, cfg.emb_dim},
                    {Act::ReLU, Act::Identity}, {kReluGain, 1.0},
                    derive_seed(seed, 0))),
      fwd(build_net({cfg.emb_dim + n_actions, cfg.hidden, cfg.emb_dim},
                    {Act::ReLU, Act::Identity}, {kReluGain, 1.0},
                    derive_seed(seed, 1))),
      inv(build_net({2 * cfg.emb_dim, cfg.hidden, n_actions},
                    {Act::ReLU, Act::Identity}, {kReluGain, 1.0},
                    derive_seed(seed, 2))),
      cfg_(cfg),
      obs_dim_(obs_dim),
      n_actions_(n_actions),
      opt_psi_(psi, cfg.lr),
      opt_fwd_(fwd, cfg.lr),
      opt_inv_(inv, cfg.lr),
      rng_(derive_seed(seed, 3)) {}

Matf Icm::embed_rollout(const Rollout& r) const {
  Matf z = minmax_normalize_rows(r.obs).cast<float>();
  return forward(psi, z);
}

BonusResult Icm::compute(const Rollout& r) {
  const int N = r.T * r.E;
  Matf emb = embed_rollout(r);  // emb_dim x (T+1)*E

  Eigen::VectorXi acts(N);
  for (int t = 0; t < r.T; ++t)
    for (int e = 0; e < r.E; ++e) acts(t * r.E + e) = r.actions(t, e);
  Matf cur = stack_onehot(emb.leftCols(N), acts, n_actions_);
  Matf pred = forward(fwd, cur);
  Matf diff = pred - emb.middleCols(r.E, N);

  BonusResult out;
  out.raw.resize(r.T, r.E);
  for (int t = 0; t < r.T; ++t)
    for (int e = 0; e < r.E; ++e)
      out.raw(t, e) = diff.col(t * r.E + e).cast<double>().squaredNorm();

  Eigen::ArrayXd flat = out.raw.reshaped().array();
  reward_rms.update_scalar(flat);
  out.norm = out.raw / std::sqrt(reward_rms.var()(0) + reward_rms.epsilon());
  return out;
}

void Icm::update(const Rollout& r, double proportion) {
  const int N = r.T * r.E;
  auto idx = subsample_indices(N, proportion, rng_);
  const int m = static_cast<int>(idx.size());
  if (m == 0) return;

  Matf zn = minmax_normalize_rows(r.obs).cast<float>();
  Matf o_t(obs_dim_, m), o_next(obs_dim_, m);
  Eigen::VectorXi acts(m);
  for (int i = 0; i < m; ++i) {
    int64_t n = idx[i];
    o_t.col(i) = zn.col(n);
    o_next.col(i) = zn.col(n + r.E);
    acts(i) = r.actions(static_cast<int>(n / r.E),
                        static_cast<int>(n % r.E));
  }

  ForwardCache<float> c_cur, c_next;
  Matf e_t = forward(psi, o_t, &c_cur);
  Matf e_next = forward(psi, o_next, &c_next);

  // Forward model: MSE against the (detached) next embedding. The gradient
  // stops at the embedding so prediction error cannot collapse it.
  ForwardCache<float> c_fwd;
  Matf pred = forward(fwd, stack_onehot(e_t, acts, n_actions_), &c_fwd);
  Matf derr = pred - e_next;
  double fwd_loss = derr.cast<double>().squaredNorm() / m;
  Matf dpred = derr * static_cast<float>(2.0 * cfg_.forward_coef / m);
  Gradients<float> g_fwd = backward(fwd, c_fwd, dpred);

  // Inverse model: cross-entropy on the action, trained through psi.
  Matf pair(2 * cfg_.emb_dim, m);
  pair.topRows(cfg_.emb_dim) = e_t;
  pair.bottomRows(cfg_.emb_dim) = e_next;
  ForwardCache<float> c_inv;
  Matf logits = forward(inv, pair, &c_inv);
  Matf dlogits;
  double inv_loss = softmax_xent(logits, acts, &dlogits);
  dlogits *= static_cast<float>(cfg_.inverse_coef);
  Matf dpair;
  Gradients<float> g_inv = backward(inv, c_inv, dlogits, &dpair);
  Gradients<float> g_psi = backward(psi, c_cur, Matf(dpair.topRows(cfg_.emb_dim)));
  g_psi.add(backward(psi, c_next, Matf(dpair.bottomRows(cfg_.emb_dim))));

  if (!std::isfinite(fwd_loss) || !std::isfinite(inv_loss)) {
    std::fprintf(stderr, "icm: non-finite loss, skipping update\n");
    return;
  }
  opt_fwd_.step(fwd, g_fwd);
  opt_inv_.step(inv, g_inv);
  opt_psi_.step(psi, g_psi);
}

}  // namespace hire
