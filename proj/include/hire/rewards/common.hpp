#pragma once

#include <Eigen/Dense>

#include "hire/nn/mlp.hpp"

namespace hire {

// Softmax cross-entropy over logit columns. Returns the mean loss and fills
// dlogits with the gradient of that mean (softmax minus one-hot, divided by
// the batch size).
inline double softmax_xent(const Matf& logits, const Eigen::VectorXi& labels,
                           Matf* dlogits) {
  const int n = static_cast<int>(logits.cols());
  Matf p = logits;
  double loss = 0.0;
  for (int c = 0; c < n; ++c) {
    float mx = p.col(c).maxCoeff();
    p.col(c) = (p.col(c).array() - mx).exp();
    float z = p.col(c).sum();
    p.col(c) /= z;
    loss -= std::log(static_cast<double>(p(labels(c), c)) + 1e-12);
  }
  if (dlogits) {
    *dlogits = p / static_cast<float>(n);
    for (int c = 0; c < n; ++c) (*dlogits)(labels(c), c) -= 1.0f / n;
  }
  return loss / n;
}

// One-hot action block appended below an embedding batch.
inline Matf stack_onehot(const Matf& emb, const Eigen::VectorXi& labels,
                         int n_classes) {
  Matf out(emb.rows() + n_classes, emb.cols());
  out.topRows(emb.rows()) = emb;
  out.bottomRows(n_classes).setZero();
  for (int c = 0; c < emb.cols(); ++c)
    out(emb.rows() + labels(c), c) = 1.0f;
  return out;
}

}  // namespace hire
