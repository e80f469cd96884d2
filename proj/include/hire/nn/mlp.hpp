#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "hire/util/rng.hpp"

namespace hire {

template <typename S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

using Matf = Mat<float>;
using Vecf = Vec<float>;
using Matd = Mat<double>;
using Vecd = Vec<double>;

enum class Act { ReLU, Tanh, Identity };

inline const char* act_name(Act a) {
  switch (a) {
    case Act::ReLU: return "relu";
    case Act::Tanh: return "tanh";
    case Act::Identity: return "identity";
  }
  return "?";
}

inline Act act_from_name(const std::string& s) {
  if (s == "relu") return Act::ReLU;
  if (s == "tanh") return Act::Tanh;
  if (s == "identity") return Act::Identity;
  throw std::invalid_argument("unknown activation: " + s);
}

// Parameters of a fully connected net. Weight l maps layer input l to
// pre-activation l: z = W[l]·x + b[l], y = act[l](z). Batches are stored
// one sample per column, so a forward pass is a plain matrix product.
template <typename S>
struct MlpParams {
  std::vector<Mat<S>> W;
  std::vector<Vec<S>> b;
  std::vector<Act> act;

  int n_layers() const { return static_cast<int>(W.size()); }
  int in_dim() const { return static_cast<int>(W.front().cols()); }
  int out_dim() const { return static_cast<int>(W.back().rows()); }

  size_t n_scalars() const {
    size_t n = 0;
    for (int l = 0; l < n_layers(); ++l) n += W[l].size() + b[l].size();
    return n;
  }
};

template <typename S>
struct Gradients {
  std::vector<Mat<S>> dW;
  std::vector<Vec<S>> db;

  static Gradients zeros_like(const MlpParams<S>& p) {
    Gradients g;
    for (int l = 0; l < p.n_layers(); ++l) {
      g.dW.push_back(Mat<S>::Zero(p.W[l].rows(), p.W[l].cols()));
      g.db.push_back(Vec<S>::Zero(p.b[l].size()));
    }
    return g;
  }

  void add(const Gradients& o) {
    for (size_t l = 0; l < dW.size(); ++l) {
      dW[l] += o.dW[l];
      db[l] += o.db[l];
    }
  }

  void scale(S s) {
    for (size_t l = 0; l < dW.size(); ++l) {
      dW[l] *= s;
      db[l] *= s;
    }
  }

  bool all_finite() const {
    for (size_t l = 0; l < dW.size(); ++l)
      if (!dW[l].allFinite() || !db[l].allFinite()) return false;
    return true;
  }
};

// Per-layer inputs and pre-activations from a forward pass, enough to run
// backward without recomputing anything.
template <typename S>
struct ForwardCache {
  std::vector<Mat<S>> input;   // input[l] = what layer l saw
  std::vector<Mat<S>> preact;  // preact[l] = W[l]·input[l] + b[l]
};

template <typename S>
Mat<S> apply_act(Act a, const Mat<S>& z) {
  switch (a) {
    case Act::ReLU: return z.cwiseMax(S(0));
    case Act::Tanh: return z.array().tanh().matrix();
    case Act::Identity: return z;
  }
  return z;
}

// Derivative of the activation at pre-activation z, elementwise.
template <typename S>
Mat<S> act_grad(Act a, const Mat<S>& z) {
  switch (a) {
    case Act::ReLU:
      return (z.array() > S(0)).template cast<S>().matrix();
    case Act::Tanh: {
      Mat<S> t = z.array().tanh().matrix();
      return (S(1) - t.array().square()).matrix();
    }
    case Act::Identity: return Mat<S>::Ones(z.rows(), z.cols());
  }
  return Mat<S>::Ones(z.rows(), z.cols());
}

template <typename S>
Mat<S> forward(const MlpParams<S>& p, const Mat<S>& x,
               ForwardCache<S>* cache = nullptr) {
  if (x.rows() != p.in_dim())
    throw std::invalid_argument("forward: input width " +
                                std::to_string(x.rows()) + " != " +
                                std::to_string(p.in_dim()));
  if (cache) {
    cache->input.clear();
    cache->preact.clear();
  }
  Mat<S> h = x;
  for (int l = 0; l < p.n_layers(); ++l) {
    Mat<S> z = (p.W[l] * h).colwise() + p.b[l];
    if (cache) {
      cache->input.push_back(std::move(h));
      cache->preact.push_back(z);
    }
    h = apply_act(p.act[l], z);
  }
  return h;
}

// Reverse-mode pass. dy is dLoss/dOutput with the same shape as the forward
// output. If dx is non-null it receives dLoss/dInput, which is how gradients
// flow between chained nets (e.g. an encoder feeding a prediction head).
template <typename S>
Gradients<S> backward(const MlpParams<S>& p, const ForwardCache<S>& cache,
                      const Mat<S>& dy, Mat<S>* dx = nullptr) {
  if (static_cast<int>(cache.input.size()) != p.n_layers())
    throw std::invalid_argument("backward: cache does not match params");
  Gradients<S> g;
  g.dW.resize(p.n_layers());
  g.db.resize(p.n_layers());
  Mat<S> delta = dy;
  for (int l = p.n_layers() - 1; l >= 0; --l) {
    delta = delta.cwiseProduct(act_grad(p.act[l], cache.preact[l]));
    g.dW[l] = delta * cache.input[l].transpose();
    g.db[l] = delta.rowwise().sum();
    if (l > 0 || dx) delta = (p.W[l].transpose() * delta).eval();
  }
  if (dx) *dx = delta;
  return g;
}

// Random matrix with gain-scaled orthonormal rows or columns, whichever
// dimension is smaller. QR of a Gaussian matrix, with the usual sign fix on
// diag(R) so the distribution is uniform over the orthogonal group.
template <typename S>
Mat<S> orthogonal_matrix(int rows, int cols, double gain, Rng& rng) {
  if (gain == 0.0) return Mat<S>::Zero(rows, cols);
  int n = std::max(rows, cols), m = std::min(rows, cols);
  Matd a(n, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i) a(i, j) = rng.normal();
  Eigen::HouseholderQR<Matd> qr(a);
  Matd q = qr.householderQ() * Matd::Identity(n, m);
  Matd r = qr.matrixQR().topRows(m);
  for (int k = 0; k < m; ++k)
    if (r(k, k) < 0.0) q.col(k) = -q.col(k);
  q *= gain;
  Matd w = (rows >= cols) ? q : Matd(q.transpose());
  return w.template cast<S>();
}

// dims = {in, h1, ..., out}; gains and acts are per layer (dims.size()-1).
template <typename S>
MlpParams<S> make_mlp(const std::vector<int>& dims,
                      const std::vector<Act>& acts,
                      const std::vector<double>& gains, Rng& rng) {
  size_t n_layers = dims.size() - 1;
  if (acts.size() != n_layers || gains.size() != n_layers)
    throw std::invalid_argument("make_mlp: dims/acts/gains length mismatch");
  MlpParams<S> p;
  for (size_t l = 0; l < n_layers; ++l) {
    p.W.push_back(orthogonal_matrix<S>(dims[l + 1], dims[l], gains[l], rng));
    p.b.push_back(Vec<S>::Zero(dims[l + 1]));
    p.act.push_back(acts[l]);
  }
  return p;
}

// Uniform-gain convenience: same gain on every layer.
template <typename S>
MlpParams<S> orthogonal_init(const std::vector<int>& dims,
                             const std::vector<Act>& acts, double gain,
                             Rng& rng) {
  return make_mlp<S>(dims, acts, std::vector<double>(dims.size() - 1, gain),
                     rng);
}

// Global L2 norm across several gradient sets, accumulated in double. If it
// exceeds max_norm every entry is scaled down by max_norm/norm. Returns the
// pre-clip norm.
template <typename S>
double clip_grad_norm(std::vector<Gradients<S>*> gs, double max_norm) {
  double sq = 0.0;
  for (auto* g : gs) {
    for (size_t l = 0; l < g->dW.size(); ++l) {
      sq += g->dW[l].template cast<double>().squaredNorm();
      sq += g->db[l].template cast<double>().squaredNorm();
    }
  }
  double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    S s = static_cast<S>(max_norm / norm);
    for (auto* g : gs)
      for (size_t l = 0; l < g->dW.size(); ++l) {
        g->dW[l] *= s;
        g->db[l] *= s;
      }
  }
  return norm;
}

template <typename S>
double clip_grad_norm(Gradients<S>& g, double max_norm) {
  return clip_grad_norm<S>({&g}, max_norm);
}

// Bias-corrected Adam. Moments are stored at the parameter precision; the
// bias-correction factors are computed in double. Non-finite gradients skip
// the update with a warning instead of poisoning the parameters.
template <typename S>
class Adam {
 public:
  Adam(const MlpParams<S>& p, double lr, double beta1 = 0.9,
       double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
    for (int l = 0; l < p.n_layers(); ++l) {
      mW_.push_back(Mat<S>::Zero(p.W[l].rows(), p.W[l].cols()));
      vW_.push_back(Mat<S>::Zero(p.W[l].rows(), p.W[l].cols()));
      mb_.push_back(Vec<S>::Zero(p.b[l].size()));
      vb_.push_back(Vec<S>::Zero(p.b[l].size()));
    }
  }

  // Returns false (and leaves everything untouched) on non-finite grads.
  bool step(MlpParams<S>& p, const Gradients<S>& g) {
    if (!g.all_finite()) {
      std::fprintf(stderr, "adam: non-finite gradients, skipping update\n");
      return false;
    }
    ++t_;
    double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    S b1 = static_cast<S>(beta1_), b2 = static_cast<S>(beta2_);
    S ic1 = static_cast<S>(1.0 / c1), ic2 = static_cast<S>(1.0 / c2);
    S eps = static_cast<S>(eps_), lr = static_cast<S>(lr_);
    for (size_t l = 0; l < p.W.size(); ++l) {
      mW_[l] = b1 * mW_[l] + (S(1) - b1) * g.dW[l];
      vW_[l] = (b2 * vW_[l].array() +
                (S(1) - b2) * g.dW[l].array().square()).matrix();
      p.W[l].array() -= lr * (mW_[l].array() * ic1) /
                        ((vW_[l].array() * ic2).sqrt() + eps);
      mb_[l] = b1 * mb_[l] + (S(1) - b1) * g.db[l];
      vb_[l] = (b2 * vb_[l].array() +
                (S(1) - b2) * g.db[l].array().square()).matrix();
      p.b[l].array() -= lr * (mb_[l].array() * ic1) /
                        ((vb_[l].array() * ic2).sqrt() + eps);
    }
    return true;
  }

  void set_lr(double lr) { lr_ = lr; }
  double lr() const { return lr_; }
  int64_t steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  int64_t t_ = 0;
  std::vector<Mat<S>> mW_, vW_;
  std::vector<Vec<S>> mb_, vb_;
};

}  // namespace hire
