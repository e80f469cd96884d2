#include "hire/rewards/ngu.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hire/rewards/module.hpp"

namespace hire {

namespace {

MlpParams<float> build_net(int obs_dim, int hidden, int emb, uint64_t seed) {
  Rng rng(seed);
  return make_mlp<float>({obs_dim, hidden, emb}, {Act::ReLU, Act::Identity},
                         {1.4142135623730951, 1.0}, rng);
}

}  // namespace

double ngu_pseudo_count(const std::vector<Eigen::VectorXd>& memory,
                        const Eigen::VectorXd& query, int k, double eps_k,
                        double c, NguKernelState& dm2) {
  if (memory.empty()) return c;
  std::vector<double> d2(memory.size());
  for (size_t i = 0; i < memory.size(); ++i)
    d2[i] = (memory[i] - query).squaredNorm();
  int kk = std::min<int>(k, static_cast<int>(d2.size()));
  std::nth_element(d2.begin(), d2.begin() + (kk - 1), d2.end());
  d2.resize(kk);
  // the mean squared neighbor distance adapts the kernel's length scale
  for (double v : d2) {
    ++dm2.dm2_count;
    dm2.dm2_mean += (v - dm2.dm2_mean) / static_cast<double>(dm2.dm2_count);
  }
  double scale = std::max(dm2.dm2_mean, 1e-8);
  double ksum = 0.0;
  for (double v : d2) ksum += eps_k / (v / scale + eps_k);
  return std::sqrt(ksum) + c;
}

Ngu::Ngu(int obs_dim, int n_actions, int n_envs, const NguConfig& cfg,
         uint64_t seed)
    : target(build_net(obs_dim, cfg.hidden, cfg.emb_dim,
                       derive_seed(seed, 0))),
      predictor(build_net(obs_dim, cfg.hidden, cfg.emb_dim,
                          derive_seed(seed, 1))),
      obs_rms(obs_dim),
      cfg_(cfg),
      obs_dim_(obs_dim),
      n_actions_(n_actions),
      memory_(n_envs),
      opt_pred_(predictor, cfg.lr),
      rng_(derive_seed(seed, 2)) {}

BonusResult Ngu::compute(const Rollout& r) {
  const int N = r.T * r.E;
  obs_rms.update(r.obs.leftCols(N));
  Matf zn = obs_rms.normalize_obs(r.obs.leftCols(N)).cast<float>();
  Matf emb_t = forward(target, zn);
  Matf emb_p = forward(predictor, zn);

  Eigen::ArrayXd err(N);
  for (int n = 0; n < N; ++n)
    err(n) = (emb_p.col(n) - emb_t.col(n)).cast<double>().squaredNorm();
  err_stats.update_scalar(err);
  double mu = err_stats.mean()(0);
  double sd = std::sqrt(err_stats.var()(0) + 1e-8);

  BonusResult out;
  out.raw.resize(r.T, r.E);
  for (int e = 0; e < r.E; ++e) {
    for (int t = 0; t < r.T; ++t) {
      int n = t * r.E + e;
      double alpha = 1.0 + (err(n) - mu) / sd;
      double lifelong = std::clamp(alpha, 1.0, cfg_.C);
      Eigen::VectorXd q = emb_t.col(n).cast<double>();
      double pc = ngu_pseudo_count(memory_[e], q, cfg_.k, cfg_.eps_k, cfg_.c,
                                   kernel_state);
      out.raw(t, e) = lifelong / pc;
      memory_[e].push_back(std::move(q));
      if (r.dones(t, e) != 0.0) memory_[e].clear();
    }
  }

  reward_rms.update_scalar(out.raw.reshaped().array());
  out.norm = out.raw / std::sqrt(reward_rms.var()(0) + reward_rms.epsilon());
  return out;
}

void Ngu::update(const Rollout& r, double proportion) {
  const int N = r.T * r.E;
  auto idx = subsample_indices(N, proportion, rng_);
  const int m = static_cast<int>(idx.size());
  if (m == 0) return;

  Matf zn = obs_rms.normalize_obs(r.obs.leftCols(N)).cast<float>();
  Matf batch(obs_dim_, m);
  for (int i = 0; i < m; ++i) batch.col(i) = zn.col(idx[i]);

  ForwardCache<float> cache;
  Matf pred = forward(predictor, batch, &cache);
  Matf targ = forward(target, batch);
  Matf derr = pred - targ;
  double loss = derr.cast<double>().squaredNorm() / m;
  if (!std::isfinite(loss)) {
    std::fprintf(stderr, "ngu: non-finite loss, skipping update\n");
    return;
  }
  Gradients<float> g =
      backward(predictor, cache, Matf(derr * static_cast<float>(2.0 / m)));
  opt_pred_.step(predictor, g);
}

}  // namespace hire
