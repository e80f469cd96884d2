#pragma once

#include <vector>

#include "hire/nn/mlp.hpp"
#include "hire/norm/running.hpp"
#include "hire/rewards/module.hpp"

namespace hire {

struct NguConfig {
  int emb_dim = 16;
  int hidden = 64;
  int k = 10;          // episodic neighbors
  double C = 5.0;      // lifelong factor ceiling
  double c = 0.25;     // pseudo-count floor; bounds the bonus at 1/c for unseen states
  double eps_k = 1e-4; // kernel constant
  double lr = 1e-3;
};

// Episodic novelty via an inverse-kernel pseudo-count over the episode's
// embeddings, scaled by a lifelong factor from a random-network-distillation
// error. One frozen random net doubles as the RND target and the episodic
// embedder; only the predictor trains.
struct NguKernelState {
  double dm2_mean = 0.0;  // running mean of observed k-NN squared distances
  int64_t dm2_count = 0;
};

// Kernel sum over the k nearest memory points. Empty memory returns the
// floor c. dm2 advances with each query's neighbor distances before the
// kernel is evaluated.
double ngu_pseudo_count(const std::vector<Eigen::VectorXd>& memory,
                        const Eigen::VectorXd& query, int k, double eps_k,
                        double c, NguKernelState& dm2);

class Ngu : public RewardModule {
 public:
  Ngu(int obs_dim, int n_actions, int n_envs, const NguConfig& cfg,
      uint64_t seed);

  const std::string& name() const override { return name_; }
  BonusResult compute(const Rollout& r) override;
  void update(const Rollout& r, double proportion) override;
  void on_episode_boundary(int env) override { memory_[env].clear(); }
  std::unique_ptr<RewardModule> clone() const override {
    return std::make_unique<Ngu>(*this);
  }

  MlpParams<float> target;     // frozen
  MlpParams<float> predictor;
  RunningMeanStd obs_rms;
  RunningMeanStd err_stats{1};
  RunningMeanStd reward_rms{1};
  NguKernelState kernel_state;
  const std::vector<std::vector<Eigen::VectorXd>>& memory() const {
    return memory_;
  }

 private:
  std::string name_ = "NGU";
  NguConfig cfg_;
  int obs_dim_, n_actions_;
  std::vector<std::vector<Eigen::VectorXd>> memory_;  // per env, per step
  Adam<float> opt_pred_;
  Rng rng_;
};

}  // namespace hire
