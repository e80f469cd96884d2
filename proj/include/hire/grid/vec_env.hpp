#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <vector>

#include "hire/grid/gridworld.hpp"

namespace hire {

struct StepBatch {
  Eigen::MatrixXd obs;        // obs_dim x E, already auto-reset where needed
  Eigen::ArrayXd reward;      // extrinsic, per env
  std::vector<uint8_t> terminal;
  std::vector<uint8_t> truncated;
  // terminal || truncated: the row after which episodic module state must
  // be cleared for that env.
  std::vector<uint8_t> episode_boundary;
};

// E independent sub-environments stepped in lockstep. Each env draws its
// layout seeds from its own derived stream, so trajectories depend only on
// (spec, master_seed, actions).
class VectorEnv {
 public:
  VectorEnv(const GridSpec& spec, int n_envs, uint64_t master_seed);

  // Starts every env on a fresh episode and returns the batched obs.
  Eigen::MatrixXd reset();
  StepBatch step(const std::vector<int>& actions);

  int n_envs() const { return static_cast<int>(envs_.size()); }
  int obs_dim() const { return kObsDim; }
  const GridSpec& spec() const { return spec_; }
  const GridWorld& env(int i) const { return *envs_[i]; }

 private:
  uint64_t next_seed(int i) {
    return derive_seed(derive_seed(master_seed_, i + 1), episode_count_[i]++);
  }

  GridSpec spec_;
  uint64_t master_seed_;
  std::vector<std::unique_ptr<GridWorld>> envs_;
  std::vector<uint64_t> episode_count_;
};

}  // namespace hire
