#include "hire/rewards/re3.hpp"

#include <cmath>
#include <cstdio>

#include "hire/rewards/knn.hpp"

namespace hire {

Re3::Re3(int obs_dim, int n_actions, const Re3Config& cfg, uint64_t seed)
    : obs_rms(obs_dim), cfg_(cfg), obs_dim_(obs_dim) {
  (void)n_actions;
  Rng rng(derive_seed(seed, 0));
  encoder = make_mlp<float>({obs_dim, cfg.hidden, cfg.emb_dim},
                            {Act::ReLU, Act::Identity},
                            {1.4142135623730951, 1.0}, rng);
}

BonusResult Re3::compute(const Rollout& r) {
  const int N = r.T * r.E;
  obs_rms.update(r.obs.leftCols(N));
  Matf zn = obs_rms.normalize_obs(r.obs.leftCols(N)).cast<float>();
  Matf emb = forward(encoder, zn);

  int k = std::min(cfg_.k, r.T - 1);
  if (k < cfg_.k && !warned_small_t_) {
    std::fprintf(stderr,
                 "re3: rollout length %d too short for k=%d, using k=%d\n",
                 r.T, cfg_.k, k);
    warned_small_t_ = true;
  }

  BonusResult out;
  out.raw = Eigen::MatrixXd::Zero(r.T, r.E);
  if (k >= 1) {
    Eigen::MatrixXd z(emb.rows(), r.T);
    for (int e = 0; e < r.E; ++e) {
      for (int t = 0; t < r.T; ++t)
        z.col(t) = emb.col(t * r.E + e).cast<double>();
      for (int t = 0; t < r.T; ++t) {
        std::vector<double> d = knn_distances(z, z.col(t), k, t);
        double acc = 0.0;
        for (double dist : d) acc += std::log(dist + 1.0);
        out.raw(t, e) = acc / static_cast<double>(d.size());
      }
    }
  }

  Eigen::ArrayXd flat = out.raw.reshaped().array();
  out.norm = minmax_normalize(flat).reshaped(r.T, r.E).matrix();
  return out;
}

}  // namespace hire
