#pragma once

#include "hire/nn/mlp.hpp"
#include "hire/norm/running.hpp"
#include "hire/rewards/module.hpp"

namespace hire {

struct IcmConfig {
  int emb_dim = 16;
  int hidden = 64;
  double lr = 1e-3;
  double forward_coef = 1.0;
  double inverse_coef = 1.0;
};

// Curiosity by forward-model error: embed obs, predict the next embedding
// from (embedding, action), and pay the squared prediction error as bonus.
// The embedding is shaped by an inverse-dynamics head so it keeps only
// controllable features; the forward loss never trains the embedding.
class Icm : public RewardModule {
 public:
  Icm(int obs_dim, int n_actions, const IcmConfig& cfg, uint64_t seed);

  const std::string& name() const override { return name_; }
  BonusResult compute(const Rollout& r) override;
  void update(const Rollout& r, double proportion) override;
  void on_episode_boundary(int) override {}  // nothing episodic
  std::unique_ptr<RewardModule> clone() const override {
    return std::make_unique<Icm>(*this);
  }

  // exposed for white-box tests
  MlpParams<float> psi;      // obs -> embedding
  MlpParams<float> fwd;      // (embedding, action one-hot) -> next embedding
  MlpParams<float> inv;      // (embedding, next embedding) -> action logits
  RunningMeanStd reward_rms{1};

 private:
  Matf embed_rollout(const Rollout& r) const;

  std::string name_ = "ICM";
  IcmConfig cfg_;
  int obs_dim_, n_actions_;
  Adam<float> opt_psi_, opt_fwd_, opt_inv_;
  Rng rng_;
};

}  // namespace hire
