#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace hire {

// One iteration's worth of trajectory data for T steps of E lockstep envs.
// Observation column index is t*E + e; row t of the per-step matrices is the
// transition taken from obs slice t to slice t+1.
struct Rollout {
  int T = 0, E = 0;
  Eigen::MatrixXd obs;         // obs_dim x (T+1)*E
  Eigen::MatrixXi actions;     // T x E
  Eigen::MatrixXd extrinsic;   // T x E
  // terminal-or-truncated, as 0/1. Marks both the GAE mask and the episode
  // boundary after which episodic module state resets.
  Eigen::MatrixXd dones;
  Eigen::MatrixXd values;      // (T+1) x E, last row is the bootstrap value
  Eigen::MatrixXd logprobs;    // T x E
  // Per-env cumulative environment-step counter at each row (drives the
  // cycle fusion index). Same value across a row since envs step in lockstep.
  Eigen::Matrix<int64_t, Eigen::Dynamic, Eigen::Dynamic> steps;
  Eigen::MatrixXd combined;    // T x E, filled after fusion
  Eigen::MatrixXd advantages;  // T x E
  Eigen::MatrixXd returns;     // T x E

  void allocate(int obs_dim, int t_len, int n_envs) {
    T = t_len;
    E = n_envs;
    obs.resize(obs_dim, (T + 1) * E);
    actions.resize(T, E);
    extrinsic.resize(T, E);
    dones.resize(T, E);
    values.resize(T + 1, E);
    logprobs.resize(T, E);
    steps.resize(T, E);
    combined.resize(T, E);
    advantages.resize(T, E);
    returns.resize(T, E);
  }

  auto obs_at(int t) { return obs.middleCols(t * E, E); }
  auto obs_at(int t) const { return obs.middleCols(t * E, E); }
};

}  // namespace hire
