#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <vector>

namespace hire {

// The k smallest L2 distances from the query to the pool's columns, in
// ascending order. exclude lets a point skip itself when the query is a
// member of the pool. Returns fewer than k when the pool is small.
inline std::vector<double> knn_distances(const Eigen::MatrixXd& pool,
                                         const Eigen::VectorXd& query, int k,
                                         Eigen::Index exclude = -1) {
  std::vector<double> d2;
  d2.reserve(pool.cols());
  for (Eigen::Index j = 0; j < pool.cols(); ++j) {
    if (j == exclude) continue;
    d2.push_back((pool.col(j) - query).squaredNorm());
  }
  int kk = std::min<int>(k, static_cast<int>(d2.size()));
  if (kk <= 0) return {};
  std::nth_element(d2.begin(), d2.begin() + (kk - 1), d2.end());
  d2.resize(kk);
  std::sort(d2.begin(), d2.end());
  for (double& v : d2) v = std::sqrt(v);
  return d2;
}

}  // namespace hire
