#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

#include "hire/rollout.hpp"
#include "hire/util/rng.hpp"

namespace hire {

struct BonusResult {
  Eigen::MatrixXd raw;   // T x E, the formula's output
  Eigen::MatrixXd norm;  // T x E, after the module's reward normalization
};

// Uniform face of the four bonus generators. compute() never touches
// learned parameters; episodic accumulators (memories, ellipsoids, running
// stats) do advance as part of scoring a rollout. update() is the gradient
// step. Mid-rollout episode ends are handled inside compute() via the
// rollout's done flags; on_episode_boundary() is the external hook for
// clearing one env's episodic state between rollouts.
class RewardModule {
 public:
  virtual ~RewardModule() = default;
  virtual const std::string& name() const = 0;
  virtual BonusResult compute(const Rollout& r) = 0;
  virtual void update(const Rollout& r, double proportion) = 0;
  virtual void on_episode_boundary(int env) = 0;
  virtual std::unique_ptr<RewardModule> clone() const = 0;
};

// round(n*proportion) distinct indices (at least 1), uniformly without
// replacement. proportion 1 covers every index exactly once.
std::vector<int64_t> subsample_indices(int64_t n, double proportion, Rng& rng);

// name may be a full module name (ICM/NGU/RE3/E3B) or its one-letter
// abbreviation. cfg carries optional per-module overrides.
std::unique_ptr<RewardModule> make_reward_module(
    const std::string& name, int obs_dim, int n_actions, int n_envs,
    const nlohmann::json& cfg, uint64_t seed);

std::string canonical_module_name(const std::string& name);

}  // namespace hire
