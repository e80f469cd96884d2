#include "hire/rewards/e3b.hpp"

#include <cmath>
#include <cstdio>

#include "hire/rewards/common.hpp"
#include "hire/rewards/module.hpp"

namespace hire {

namespace {

MlpParams<float> build_net(const std::vector<int>& dims, uint64_t seed) {
  Rng rng(seed);
  return make_mlp<float>(dims, {Act::ReLU, Act::Identity},
                         {1.4142135623730951, 1.0}, rng);
}

}  // namespace

E3b::E3b(int obs_dim, int n_actions, int n_envs, const E3bConfig& cfg,
         uint64_t seed)
    : encoder(build_net({obs_dim, cfg.hidden, cfg.emb_dim},
                        derive_seed(seed, 0))),
      inv_head(build_net({2 * cfg.emb_dim, cfg.hidden, n_actions},
                         derive_seed(seed, 1))),
      obs_rms(obs_dim),
      cfg_(cfg),
      obs_dim_(obs_dim),
      n_actions_(n_actions),
      opt_enc_(encoder, cfg.lr),
      opt_head_(inv_head, cfg.lr),
      rng_(derive_seed(seed, 2)) {
  cinv_.resize(n_envs);
  for (int e = 0; e < n_envs; ++e) reset_ellipsoid(e);
}

void E3b::reset_ellipsoid(int env) {
  cinv_[env] = Eigen::MatrixXd::Identity(cfg_.emb_dim, cfg_.emb_dim) /
               cfg_.lambda;
}

BonusResult E3b::compute(const Rollout& r) {
  const int N = r.T * r.E;
  obs_rms.update(r.obs.leftCols(N));
  Matf zn = obs_rms.normalize_obs(r.obs.leftCols(N)).cast<float>();
  Matf emb = forward(encoder, zn);

  BonusResult out;
  out.raw.resize(r.T, r.E);
  for (int e = 0; e < r.E; ++e) {
    for (int t = 0; t < r.T; ++t) {
      Eigen::VectorXd phi = emb.col(t * r.E + e).cast<double>();
      Eigen::VectorXd u = cinv_[e] * phi;
      double b = phi.dot(u);
      if (!std::isfinite(b) || b < 0.0) {
        std::fprintf(stderr,
                     "e3b: ellipsoid lost positive-definiteness (env %d), "
                     "resetting\n", e);
        reset_ellipsoid(e);
        u = cinv_[e] * phi;
        b = phi.dot(u);
      }
      out.raw(t, e) = b;
      // Sherman-Morrison rank-1 update of the inverse Gram matrix; the
      // symmetrization step stops tiny asymmetries from accumulating.
      cinv_[e] -= (u * u.transpose()) / (1.0 + b);
      cinv_[e] = ((cinv_[e] + cinv_[e].transpose()) * 0.5).eval();
      if (r.dones(t, e) != 0.0) reset_ellipsoid(e);
    }
  }

  reward_rms.update_scalar(out.raw.reshaped().array());
  out.norm = out.raw / std::sqrt(reward_rms.var()(0) + reward_rms.epsilon());
  return out;
}

void E3b::update(const Rollout& r, double proportion) {
  const int N = r.T * r.E;
  auto idx = subsample_indices(N, proportion, rng_);
  const int m = static_cast<int>(idx.size());
  if (m == 0) return;

  Matf zn = obs_rms.normalize_obs(r.obs).cast<float>();
  Matf o_t(obs_dim_, m), o_next(obs_dim_, m);
  Eigen::VectorXi acts(m);
  for (int i = 0; i < m; ++i) {
    int64_t n = idx[i];
    o_t.col(i) = zn.col(n);
    o_next.col(i) = zn.col(n + r.E);
    acts(i) = r.actions(static_cast<int>(n / r.E),
                        static_cast<int>(n % r.E));
  }

  ForwardCache<float> c_cur, c_next, c_head;
  Matf e_t = forward(encoder, o_t, &c_cur);
  Matf e_next = forward(encoder, o_next, &c_next);
  Matf pair(2 * cfg_.emb_dim, m);
  pair.topRows(cfg_.emb_dim) = e_t;
  pair.bottomRows(cfg_.emb_dim) = e_next;
  Matf logits = forward(inv_head, pair, &c_head);
  Matf dlogits;
  double loss = softmax_xent(logits, acts, &dlogits);
  if (!std::isfinite(loss)) {
    std::fprintf(stderr, "e3b: non-finite loss, skipping update\n");
    return;
  }
  Matf dpair;
  Gradients<float> g_head = backward(inv_head, c_head, dlogits, &dpair);
  Gradients<float> g_enc =
      backward(encoder, c_cur, Matf(dpair.topRows(cfg_.emb_dim)));
  g_enc.add(backward(encoder, c_next, Matf(dpair.bottomRows(cfg_.emb_dim))));
  opt_head_.step(inv_head, g_head);
  opt_enc_.step(encoder, g_enc);
}

}  // namespace hire
