#include "hire/grid/vec_env.hpp"

#include <stdexcept>

namespace hire {

VectorEnv::VectorEnv(const GridSpec& spec, int n_envs, uint64_t master_seed)
    : spec_(spec), master_seed_(master_seed) {
  if (n_envs < 1) throw std::invalid_argument("need at least one env");
  episode_count_.assign(n_envs, 0);
  for (int i = 0; i < n_envs; ++i)
    envs_.push_back(std::make_unique<GridWorld>(spec_, 0));
}

Eigen::MatrixXd VectorEnv::reset() {
  Eigen::MatrixXd obs(kObsDim, n_envs());
  for (int i = 0; i < n_envs(); ++i) {
    episode_count_[i] = 0;
    envs_[i]->reset(next_seed(i));
    envs_[i]->write_obs(obs.col(i));
  }
  return obs;
}

StepBatch VectorEnv::step(const std::vector<int>& actions) {
  if (static_cast<int>(actions.size()) != n_envs())
    throw std::invalid_argument("action batch size mismatch");
  StepBatch out;
  out.obs.resize(kObsDim, n_envs());
  out.reward.resize(n_envs());
  out.terminal.assign(n_envs(), 0);
  out.truncated.assign(n_envs(), 0);
  out.episode_boundary.assign(n_envs(), 0);
  for (int i = 0; i < n_envs(); ++i) {
    StepResult r = envs_[i]->step(actions[i]);
    out.reward(i) = r.reward;
    out.terminal[i] = r.done;
    out.truncated[i] = r.truncated;
    if (r.done || r.truncated) {
      out.episode_boundary[i] = 1;
      envs_[i]->reset(next_seed(i));
    }
    envs_[i]->write_obs(out.obs.col(i));
  }
  return out;
}

}  // namespace hire
