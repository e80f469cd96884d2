#pragma once

#include <Eigen/Dense>
#include <cstdio>
#include <stdexcept>

namespace hire {

// Running first/second moments over a stream of vector samples, merged
// batch-by-batch with Chan's parallel-variance formula. Kept in double so
// long streams don't drift. dim=1 covers scalar streams (rewards).
class RunningMeanStd {
 public:
  explicit RunningMeanStd(int dim = 1, double epsilon = 1e-8)
      : mean_(Eigen::VectorXd::Zero(dim)),
        var_(Eigen::VectorXd::Zero(dim)),
        epsilon_(epsilon) {}

  // batch: one sample per column.
  void update(const Eigen::MatrixXd& batch) {
    if (batch.cols() == 0) throw std::invalid_argument("rms_update: empty batch");
    if (batch.rows() != mean_.size())
      throw std::invalid_argument("rms_update: width mismatch");
    double n = static_cast<double>(batch.cols());
    Eigen::VectorXd bmean = batch.rowwise().mean();
    Eigen::VectorXd bvar =
        (batch.colwise() - bmean).array().square().rowwise().sum() / n;
    Eigen::VectorXd delta = bmean - mean_;
    double tot = count_ + n;
    Eigen::VectorXd m2 = var_ * count_ + bvar * n +
                         delta.array().square().matrix() * (count_ * n / tot);
    mean_ += delta * (n / tot);
    var_ = m2 / tot;
    count_ = tot;
  }

  void update_scalar(const Eigen::ArrayXd& values) {
    Eigen::MatrixXd m(1, values.size());
    m.row(0) = values.matrix().transpose();
    update(m);
  }

  // Observation mode: center and scale. Count 0 passes x through untouched.
  Eigen::MatrixXd normalize_obs(const Eigen::MatrixXd& x) const {
    if (count_ <= 0.0) {
      std::fprintf(stderr, "rms_normalize: no data yet, passing through\n");
      return x;
    }
    Eigen::ArrayXd inv_std = (var_.array() + epsilon_).sqrt().inverse();
    return ((x.colwise() - mean_).array().colwise() * inv_std).matrix();
  }

  // Reward mode: divide by std only. Centering would flip the sign of
  // below-average bonuses, turning an exploration incentive into a penalty.
  Eigen::ArrayXd normalize_reward(const Eigen::ArrayXd& r) const {
    if (count_ <= 0.0) {
      std::fprintf(stderr, "rms_normalize: no data yet, passing through\n");
      return r;
    }
    return r / std::sqrt(var_(0) + epsilon_);
  }

  double count() const { return count_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::VectorXd& var() const { return var_; }
  double epsilon() const { return epsilon_; }

  void restore(double count, Eigen::VectorXd mean, Eigen::VectorXd var) {
    count_ = count;
    mean_ = std::move(mean);
    var_ = std::move(var);
  }

 private:
  double count_ = 0.0;
  Eigen::VectorXd mean_, var_;
  double epsilon_;
};

// (x - min)/(max - min + eps) over a flat batch; a constant batch maps to 0.
inline Eigen::ArrayXd minmax_normalize(const Eigen::ArrayXd& batch,
                                       double eps = 1e-8) {
  if (batch.size() == 0)
    throw std::invalid_argument("minmax_normalize: empty batch");
  double lo = batch.minCoeff(), hi = batch.maxCoeff();
  return (batch - lo) / (hi - lo + eps);
}

// Per-row min-max over a matrix of column samples (used for observations:
// each feature dimension is rescaled independently across the batch).
inline Eigen::MatrixXd minmax_normalize_rows(const Eigen::MatrixXd& batch,
                                             double eps = 1e-8) {
  if (batch.cols() == 0)
    throw std::invalid_argument("minmax_normalize: empty batch");
  Eigen::ArrayXd lo = batch.rowwise().minCoeff();
  Eigen::ArrayXd hi = batch.rowwise().maxCoeff();
  Eigen::ArrayXd inv = (hi - lo + eps).inverse();
  return ((batch.array().colwise() - lo).colwise() * inv).matrix();
}

}  // namespace hire
