#pragma once

#include "hire/nn/mlp.hpp"
#include "hire/norm/running.hpp"
#include "hire/rewards/module.hpp"

namespace hire {

struct Re3Config {
  int emb_dim = 16;
  int hidden = 64;
  int k = 3;
};

// Entropy-style bonus from average log-distance to the k nearest neighbors
// among the same env's rollout embeddings, under a fixed random encoder.
// Nothing ever trains.
class Re3 : public RewardModule {
 public:
  Re3(int obs_dim, int n_actions, const Re3Config& cfg, uint64_t seed);

  const std::string& name() const override { return name_; }
  BonusResult compute(const Rollout& r) override;
  void update(const Rollout&, double) override {}  // encoder stays random
  void on_episode_boundary(int) override {}
  std::unique_ptr<RewardModule> clone() const override {
    return std::make_unique<Re3>(*this);
  }

  MlpParams<float> encoder;
  RunningMeanStd obs_rms;

 private:
  std::string name_ = "RE3";
  Re3Config cfg_;
  int obs_dim_;
  bool warned_small_t_ = false;
};

}  // namespace hire
