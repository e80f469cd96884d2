#pragma once

#include <vector>

#include "hire/nn/mlp.hpp"
#include "hire/norm/running.hpp"
#include "hire/rewards/module.hpp"

namespace hire {

struct E3bConfig {
  int emb_dim = 16;
  int hidden = 64;
  double lambda = 0.1;
  double lr = 1e-3;
};

// Elliptical episodic bonus: phi' C^-1 phi under the episode's regularized
// inverse Gram matrix, maintained with rank-1 Sherman-Morrison updates and
// reset to (1/lambda)*I at episode boundaries. The encoder trains through
// an inverse-dynamics head.
class E3b : public RewardModule {
 public:
  E3b(int obs_dim, int n_actions, int n_envs, const E3bConfig& cfg,
      uint64_t seed);

  const std::string& name() const override { return name_; }
  BonusResult compute(const Rollout& r) override;
  void update(const Rollout& r, double proportion) override;
  void on_episode_boundary(int env) override { reset_ellipsoid(env); }
  std::unique_ptr<RewardModule> clone() const override {
    return std::make_unique<E3b>(*this);
  }

  MlpParams<float> encoder;   // obs -> phi
  MlpParams<float> inv_head;  // (phi_t, phi_{t+1}) -> action logits
  RunningMeanStd obs_rms;
  RunningMeanStd reward_rms{1};
  const Eigen::MatrixXd& ellipsoid_inv(int env) const { return cinv_[env]; }

 private:
  void reset_ellipsoid(int env);

  std::string name_ = "E3B";
  E3bConfig cfg_;
  int obs_dim_, n_actions_;
  std::vector<Eigen::MatrixXd> cinv_;  // per env, emb_dim x emb_dim
  Adam<float> opt_enc_, opt_head_;
  Rng rng_;
};

}  // namespace hire
