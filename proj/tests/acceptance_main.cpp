// Release gate: re-verifies every guarantee the library ships, one printed
// [PASS]/[FAIL] line per check, against independently coded oracles and
// end-to-end runs. Exit code is the number of failed checks. Optional args
// select a subset by number, e.g. "acceptance 1 5 7".
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hire/analysis/analysis.hpp"
#include "hire/fusion/candidates.hpp"
#include "hire/fusion/fusion.hpp"
#include "hire/grid/gridworld.hpp"
#include "hire/harness/experiment.hpp"
#include "hire/nn/mlp.hpp"
#include "hire/ppo/ppo.hpp"
#include "hire/rewards/common.hpp"
#include "hire/rewards/e3b.hpp"
#include "hire/rewards/icm.hpp"
#include "hire/rewards/knn.hpp"
#include "hire/rewards/ngu.hpp"
#include "hire/rewards/re3.hpp"
#include "hire/rollout.hpp"
#include "hire/util/rng.hpp"

using namespace hire;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

std::string work_dir() {
  static std::string d =
      (fs::temp_directory_path() / "hire_acceptance").string();
  return d;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

Rollout random_rollout(int obs_dim, int T, int E, int n_actions, Rng& rng,
                       double done_p = 0.0) {
  Rollout r;
  r.allocate(obs_dim, T, E);
  for (Eigen::Index i = 0; i < r.obs.size(); ++i)
    r.obs.data()[i] = rng.uniform();
  for (int t = 0; t < T; ++t)
    for (int e = 0; e < E; ++e) {
      r.actions(t, e) = static_cast<int>(rng.uniform_int(0, n_actions - 1));
      r.dones(t, e) = rng.uniform() < done_p ? 1.0 : 0.0;
      r.steps(t, e) = t;
    }
  r.extrinsic.setZero();
  r.values.setZero();
  r.logprobs.setZero();
  r.combined.setZero();
  r.advantages.setZero();
  r.returns.setZero();
  return r;
}

// RFC-4180 split: quoted fields may hold commas and doubled quotes.
std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool q = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char ch = line[i];
    if (q) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          q = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      q = true;
    } else if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// 1. Nearest-neighbor parity: episodic pseudo-counts and rollout entropy
// bonuses against O(n^2) scan-and-sort re-implementations.

double pseudo_count_brute(const std::vector<Eigen::VectorXd>& memory,
                          const Eigen::VectorXd& query, int k, double eps_k,
                          double c, double& dm2_mean, int64_t& dm2_count) {
  if (memory.empty()) return c;
  std::vector<double> d2;
  for (const auto& m : memory) d2.push_back((m - query).squaredNorm());
  std::sort(d2.begin(), d2.end());
  d2.resize(std::min<size_t>(d2.size(), k));
  for (double v : d2) {
    ++dm2_count;
    dm2_mean += (v - dm2_mean) / static_cast<double>(dm2_count);
  }
  double scale = std::max(dm2_mean, 1e-8);
  double ksum = 0.0;
  for (double v : d2) ksum += eps_k / (v / scale + eps_k);
  return std::sqrt(ksum) + c;
}

double rel_err(double got, double want) {
  double denom = std::max({std::abs(got), std::abs(want), 1e-12});
  return std::abs(got - want) / denom;
}

Outcome check_knn_parity() {
  Rng rng(1001);
  double worst = 0.0;
  for (int cs = 0; cs < 200; ++cs) {
    int dim = static_cast<int>(rng.uniform_int(1, 32));
    int n = static_cast<int>(rng.uniform_int(0, 512));
    int k = static_cast<int>(rng.uniform_int(1, 16));
    double eps_k = std::pow(10.0, -static_cast<double>(rng.uniform_int(1, 4)));
    double c = 0.001 + rng.uniform() * 0.5;
    std::vector<Eigen::VectorXd> memory;
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd v(dim);
      for (int j = 0; j < dim; ++j) v(j) = rng.normal();
      // occasional duplicates exercise the zero-distance kernel limit
      if (i > 0 && rng.uniform() < 0.05) v = memory[i / 2];
      memory.push_back(std::move(v));
    }
    NguKernelState st;
    double mean = 0.0;
    int64_t count = 0;
    for (int q = 0; q < 3; ++q) {
      Eigen::VectorXd query(dim);
      for (int j = 0; j < dim; ++j) query(j) = rng.normal();
      double got = ngu_pseudo_count(memory, query, k, eps_k, c, st);
      double want =
          pseudo_count_brute(memory, query, k, eps_k, c, mean, count);
      worst = std::max(worst, rel_err(got, want));
    }
    if (st.dm2_count != count) return {false, "kernel state count drifted"};
  }

  // rollout entropy bonuses: module output vs an all-pairs scan over the
  // same frozen encoder's embeddings
  for (int cs = 0; cs < 200; ++cs) {
    int obs_dim = static_cast<int>(rng.uniform_int(2, 8));
    int T = static_cast<int>(rng.uniform_int(4, 40));
    int E = static_cast<int>(rng.uniform_int(1, 3));
    Re3Config cfg;
    cfg.hidden = 8;
    cfg.emb_dim = static_cast<int>(rng.uniform_int(2, 6));
    cfg.k = static_cast<int>(
        rng.uniform_int(1, std::min<int64_t>(5, T - 1)));
    Re3 re3(obs_dim, 3, cfg, 2000 + cs);
    auto pre = re3.clone();
    Rollout r = random_rollout(obs_dim, T, E, 3, rng, 0.1);
    BonusResult b = re3.compute(r);

    auto& ref = dynamic_cast<Re3&>(*pre);
    const int N = T * E;
    ref.obs_rms.update(r.obs.leftCols(N));
    Matf zn = ref.obs_rms.normalize_obs(r.obs.leftCols(N)).cast<float>();
    Matf emb = forward(ref.encoder, zn);
    int k = std::min(cfg.k, T - 1);
    for (int e = 0; e < E; ++e)
      for (int t = 0; t < T; ++t) {
        std::vector<double> d;
        for (int u = 0; u < T; ++u) {
          if (u == t) continue;
          d.push_back((emb.col(u * E + e).cast<double>() -
                       emb.col(t * E + e).cast<double>())
                          .norm());
        }
        std::sort(d.begin(), d.end());
        d.resize(k);
        double acc = 0.0;
        for (double v : d) acc += std::log(v + 1.0);
        worst = std::max(worst, rel_err(b.raw(t, e), acc / k));
      }
  }
  return {worst <= 1e-8, fmt("max rel err %.3g over 400 cases", worst)};
}

// ---------------------------------------------------------------------------
// 2. Ellipsoid parity: incremental rank-1 inverse updates against a direct
// inversion of the accumulated regularized Gram matrix.

Outcome check_ellipsoid_parity() {
  double worst = 0.0;
  for (int d : {4, 8, 16}) {
    E3bConfig cfg;
    cfg.hidden = 8;
    cfg.emb_dim = d;
    int obs_dim = 6;
    E3b e3b(obs_dim, 3, 1, cfg, 300 + d);
    auto pre = e3b.clone();
    Rng rng(400 + d);
    Rollout r = random_rollout(obs_dim, 100, 1, 3, rng);
    e3b.compute(r);

    auto& ref = dynamic_cast<E3b&>(*pre);
    ref.obs_rms.update(r.obs.leftCols(100));
    Matf zn = ref.obs_rms.normalize_obs(r.obs.leftCols(100)).cast<float>();
    Matf emb = forward(ref.encoder, zn);
    Eigen::MatrixXd gram = cfg.lambda * Eigen::MatrixXd::Identity(d, d);
    for (int t = 0; t < 100; ++t) {
      Eigen::VectorXd phi = emb.col(t).cast<double>();
      gram += phi * phi.transpose();
    }
    Eigen::MatrixXd direct = gram.inverse();
    worst = std::max(worst,
                     (e3b.ellipsoid_inv(0) - direct).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-6, fmt("max elementwise gap %.3g after 100 updates "
                             "at d=4,8,16", worst)};
}

// ---------------------------------------------------------------------------
// 3. Gradient parity: each learned bonus model's hand-rolled backward pass
// against central finite differences in double precision.

std::vector<int> net_dims(Rng& rng, int in, int out) {
  return {in, static_cast<int>(rng.uniform_int(3, 8)), out};
}

MlpParams<double> rand_net(const std::vector<int>& dims, Act head, Rng& rng) {
  auto p = make_mlp<double>(dims, {Act::ReLU, head}, {1.0, 1.0}, rng);
  // nudge off the ReLU kinks so h=1e-5 secants stay one-sided
  for (auto& b : p.b)
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = 0.05 * rng.normal();
  return p;
}

std::vector<double*> param_ptrs(MlpParams<double>& p) {
  std::vector<double*> ptrs;
  for (int l = 0; l < p.n_layers(); ++l) {
    for (Eigen::Index i = 0; i < p.W[l].size(); ++i)
      ptrs.push_back(p.W[l].data() + i);
    for (Eigen::Index i = 0; i < p.b[l].size(); ++i)
      ptrs.push_back(p.b[l].data() + i);
  }
  return ptrs;
}

std::vector<double> grad_flat(const Gradients<double>& g) {
  std::vector<double> out;
  for (size_t l = 0; l < g.dW.size(); ++l) {
    for (Eigen::Index i = 0; i < g.dW[l].size(); ++i)
      out.push_back(g.dW[l].data()[i]);
    for (Eigen::Index i = 0; i < g.db[l].size(); ++i)
      out.push_back(g.db[l].data()[i]);
  }
  return out;
}

double fd_vs_analytic(MlpParams<double>& p, const Gradients<double>& analytic,
                      const std::function<double()>& loss, double h = 1e-5) {
  std::vector<double*> ptrs = param_ptrs(p);
  std::vector<double> an = grad_flat(analytic);
  double worst = 0.0;
  for (size_t i = 0; i < ptrs.size(); ++i) {
    double saved = *ptrs[i];
    *ptrs[i] = saved + h;
    double up = loss();
    *ptrs[i] = saved - h;
    double dn = loss();
    *ptrs[i] = saved;
    double fd = (up - dn) / (2.0 * h);
    double denom = std::max({std::abs(fd), std::abs(an[i]), 1e-6});
    worst = std::max(worst, std::abs(fd - an[i]) / denom);
  }
  return worst;
}

double softmax_xent_d(const Matd& logits, const Eigen::VectorXi& labels,
                      Matd* dlogits) {
  const int n = static_cast<int>(logits.cols());
  Matd p = logits;
  double loss = 0.0;
  for (int c = 0; c < n; ++c) {
    double mx = p.col(c).maxCoeff();
    p.col(c) = (p.col(c).array() - mx).exp();
    p.col(c) /= p.col(c).sum();
    loss -= std::log(p(labels(c), c) + 1e-12);
  }
  if (dlogits) {
    *dlogits = p / n;
    for (int c = 0; c < n; ++c) (*dlogits)(labels(c), c) -= 1.0 / n;
  }
  return loss / n;
}

Matd stack_onehot_d(const Matd& emb, const Eigen::VectorXi& labels,
                    int n_classes) {
  Matd out(emb.rows() + n_classes, emb.cols());
  out.topRows(emb.rows()) = emb;
  out.bottomRows(n_classes).setZero();
  for (int c = 0; c < emb.cols(); ++c) out(emb.rows() + labels(c), c) = 1.0;
  return out;
}

Outcome check_gradient_parity() {
  Rng rng(777);
  double worst = 0.0;
  for (int cs = 0; cs < 50; ++cs) {
    int obs_dim = static_cast<int>(rng.uniform_int(2, 5));
    int emb = static_cast<int>(rng.uniform_int(2, 4));
    int n_act = static_cast<int>(rng.uniform_int(2, 5));
    int m = static_cast<int>(rng.uniform_int(2, 6));
    Matd o_t(obs_dim, m), o_next(obs_dim, m);
    for (Eigen::Index i = 0; i < o_t.size(); ++i) {
      o_t.data()[i] = rng.normal();
      o_next.data()[i] = rng.normal();
    }
    Eigen::VectorXi acts(m);
    for (int i = 0; i < m; ++i)
      acts(i) = static_cast<int>(rng.uniform_int(0, n_act - 1));

    int kind = cs % 3;
    if (kind == 0) {
      // curiosity: forward-model MSE on a detached embedding pair (gradient
      // stops at both embeddings) plus an inverse-model cross-entropy
      // trained through the shared encoder
      double fc = 0.5 + rng.uniform(), ic = 0.5 + rng.uniform();
      auto psi = rand_net(net_dims(rng, obs_dim, emb), Act::Identity, rng);
      auto fwd = rand_net(net_dims(rng, emb + n_act, emb), Act::Identity, rng);
      auto inv = rand_net(net_dims(rng, 2 * emb, n_act), Act::Identity, rng);

      ForwardCache<double> c_cur, c_next, c_fwd, c_inv;
      Matd e_t = forward(psi, o_t, &c_cur);
      Matd e_next = forward(psi, o_next, &c_next);
      Matd in_t = e_t, target = e_next;  // held fixed inside the MSE
      Matd pred = forward(fwd, stack_onehot_d(in_t, acts, n_act), &c_fwd);
      Matd dpred = (pred - target) * (2.0 * fc / m);
      Gradients<double> g_fwd = backward(fwd, c_fwd, dpred);
      Matd pair(2 * emb, m);
      pair.topRows(emb) = e_t;
      pair.bottomRows(emb) = e_next;
      Matd logits = forward(inv, pair, &c_inv);
      Matd dlogits;
      softmax_xent_d(logits, acts, &dlogits);
      dlogits *= ic;
      Matd dpair;
      Gradients<double> g_inv = backward(inv, c_inv, dlogits, &dpair);
      Gradients<double> g_psi =
          backward(psi, c_cur, Matd(dpair.topRows(emb)));
      g_psi.add(backward(psi, c_next, Matd(dpair.bottomRows(emb))));

      auto loss = [&]() {
        Matd et = forward(psi, o_t);
        Matd en = forward(psi, o_next);
        Matd pr = forward(fwd, stack_onehot_d(in_t, acts, n_act));
        double fwd_loss = fc * (pr - target).squaredNorm() / m;
        Matd pa(2 * emb, m);
        pa.topRows(emb) = et;
        pa.bottomRows(emb) = en;
        return fwd_loss + ic * softmax_xent_d(forward(inv, pa), acts, nullptr);
      };
      worst = std::max(worst, fd_vs_analytic(fwd, g_fwd, loss));
      worst = std::max(worst, fd_vs_analytic(inv, g_inv, loss));
      worst = std::max(worst, fd_vs_analytic(psi, g_psi, loss));
    } else if (kind == 1) {
      // novelty: predictor MSE toward a frozen random target net
      auto targ = rand_net(net_dims(rng, obs_dim, emb), Act::Identity, rng);
      auto pred = rand_net(net_dims(rng, obs_dim, emb), Act::Identity, rng);
      ForwardCache<double> cache;
      Matd yp = forward(pred, o_t, &cache);
      Matd yt = forward(targ, o_t);
      Matd derr = yp - yt;
      Gradients<double> g =
          backward(pred, cache, Matd(derr * (2.0 / m)));
      auto loss = [&]() {
        return (forward(pred, o_t) - forward(targ, o_t)).squaredNorm() / m;
      };
      worst = std::max(worst, fd_vs_analytic(pred, g, loss));
    } else {
      // elliptical: inverse-dynamics cross-entropy through the encoder
      auto enc = rand_net(net_dims(rng, obs_dim, emb), Act::Identity, rng);
      auto head = rand_net(net_dims(rng, 2 * emb, n_act), Act::Identity, rng);
      ForwardCache<double> c_cur, c_next, c_head;
      Matd e_t = forward(enc, o_t, &c_cur);
      Matd e_next = forward(enc, o_next, &c_next);
      Matd pair(2 * emb, m);
      pair.topRows(emb) = e_t;
      pair.bottomRows(emb) = e_next;
      Matd logits = forward(head, pair, &c_head);
      Matd dlogits;
      softmax_xent_d(logits, acts, &dlogits);
      Matd dpair;
      Gradients<double> g_head = backward(head, c_head, dlogits, &dpair);
      Gradients<double> g_enc =
          backward(enc, c_cur, Matd(dpair.topRows(emb)));
      g_enc.add(backward(enc, c_next, Matd(dpair.bottomRows(emb))));
      auto loss = [&]() {
        Matd et = forward(enc, o_t);
        Matd en = forward(enc, o_next);
        Matd pa(2 * emb, m);
        pa.topRows(emb) = et;
        pa.bottomRows(emb) = en;
        return softmax_xent_d(forward(head, pa), acts, nullptr);
      };
      worst = std::max(worst, fd_vs_analytic(head, g_head, loss));
      worst = std::max(worst, fd_vs_analytic(enc, g_enc, loss));
    }
  }
  return {worst <= 1e-4, fmt("max rel err %.3g over 50 configurations",
                             worst)};
}

// ---------------------------------------------------------------------------
// 4. Advantage parity: the backward GAE recursion against the direct
// discounted forward sum, over every boundary pattern up to length 16.

Eigen::ArrayXd gae_direct(const Eigen::ArrayXd& rewards,
                          const Eigen::ArrayXd& values, double bootstrap,
                          const Eigen::ArrayXd& dones, double gamma,
                          double lam) {
  Eigen::Index t_max = rewards.size();
  Eigen::ArrayXd delta(t_max), adv(t_max);
  for (Eigen::Index t = 0; t < t_max; ++t) {
    double v_next = (t + 1 < t_max) ? values(t + 1) : bootstrap;
    delta(t) = rewards(t) + gamma * v_next * (1.0 - dones(t)) - values(t);
  }
  for (Eigen::Index t = 0; t < t_max; ++t) {
    double acc = 0.0, coef = 1.0;
    for (Eigen::Index u = t; u < t_max; ++u) {
      acc += coef * delta(u);
      if (dones(u) != 0.0) break;
      coef *= gamma * lam;
    }
    adv(t) = acc;
  }
  return adv;
}

double gae_case(const Eigen::ArrayXd& rewards, const Eigen::ArrayXd& values,
                double bootstrap, const Eigen::ArrayXd& dones, double gamma,
                double lam) {
  int T = static_cast<int>(rewards.size());
  Rollout r;
  r.allocate(1, T, 1);
  for (int t = 0; t < T; ++t) {
    r.combined(t, 0) = rewards(t);
    r.values(t, 0) = values(t);
    r.dones(t, 0) = dones(t);
  }
  r.values(T, 0) = bootstrap;
  compute_gae(r, gamma, lam);
  Eigen::ArrayXd want = gae_direct(rewards, values, bootstrap, dones, gamma,
                                   lam);
  double worst = 0.0;
  for (int t = 0; t < T; ++t)
    worst = std::max(worst, std::abs(r.advantages(t, 0) - want(t)));
  return worst;
}

Outcome check_gae_parity() {
  Rng rng(555);
  double worst = 0.0;
  int64_t n_cases = 0;
  for (int T = 1; T <= 16; ++T) {
    for (uint32_t mask = 0; mask < (1u << T); ++mask) {
      Eigen::ArrayXd rewards(T), values(T), dones(T);
      for (int t = 0; t < T; ++t) {
        rewards(t) = rng.normal();
        values(t) = rng.normal();
        dones(t) = (mask >> t) & 1 ? 1.0 : 0.0;
      }
      worst = std::max(worst, gae_case(rewards, values, rng.normal(), dones,
                                       0.99, 0.95));
      ++n_cases;
    }
  }
  for (int cs = 0; cs < 100; ++cs) {
    int T = 32;
    Eigen::ArrayXd rewards(T), values(T), dones(T);
    for (int t = 0; t < T; ++t) {
      rewards(t) = rng.normal();
      values(t) = rng.normal();
      dones(t) = rng.uniform() < 0.2 ? 1.0 : 0.0;
    }
    double gamma = 0.5 + 0.5 * rng.uniform();
    double lam = rng.uniform();
    worst = std::max(worst, gae_case(rewards, values, rng.normal(), dones,
                                     gamma, lam));
    ++n_cases;
  }
  return {worst <= 1e-10,
          fmt("max abs gap %.3g over %lld mask patterns + 100 random",
              worst, static_cast<long long>(n_cases))};
}

// ---------------------------------------------------------------------------
// 5. Fusion algebra: dominance, annihilation, homogeneity, rotation
// partition, and the one-hot reduction, on random inputs.

Outcome check_fusion_algebra() {
  Rng rng(909);
  const std::vector<std::string> names = {"ICM", "NGU", "RE3", "E3B"};
  auto rand_bonuses = [&](int n, int T, int E, bool nonneg) {
    std::vector<Eigen::MatrixXd> bs(n);
    for (auto& b : bs) {
      b.resize(T, E);
      for (Eigen::Index i = 0; i < b.size(); ++i)
        b.data()[i] = nonneg ? 4.0 * rng.uniform() : rng.normal();
    }
    return bs;
  };
  auto steps_grid = [&](int T, int E) {
    Eigen::Matrix<int64_t, Eigen::Dynamic, Eigen::Dynamic> s(T, E);
    int64_t base = rng.uniform_int(0, 1000);
    for (int t = 0; t < T; ++t)
      for (int e = 0; e < E; ++e) s(t, e) = base + t;
    return s;
  };
  auto members = [&](int n) {
    return std::vector<std::string>(names.begin(), names.begin() + n);
  };

  for (int cs = 0; cs < 1000; ++cs) {
    int n = static_cast<int>(rng.uniform_int(2, 4));
    int T = static_cast<int>(rng.uniform_int(1, 8)) * n;
    int E = static_cast<int>(rng.uniform_int(1, 4));
    auto steps = steps_grid(T, E);

    // maximum: the fused value is one of the inputs and dominates all
    {
      FusionSpec spec{Strategy::Maximum, members(n), {}, 0.25, 0.0};
      auto bs = rand_bonuses(n, T, E, false);
      Eigen::MatrixXd f = fuse(spec, bs, steps);
      for (int t = 0; t < T; ++t)
        for (int e = 0; e < E; ++e) {
          double mx = bs[0](t, e);
          for (int i = 1; i < n; ++i) mx = std::max(mx, bs[i](t, e));
          if (f(t, e) != mx) return {false, "maximum is not the max"};
        }
    }

    // product: a zero anywhere annihilates that entry
    {
      FusionSpec spec{Strategy::Product, members(n), {}, 0.25, 0.0};
      auto bs = rand_bonuses(n, T, E, true);
      int zt = static_cast<int>(rng.uniform_int(0, T - 1));
      int ze = static_cast<int>(rng.uniform_int(0, E - 1));
      bs[rng.uniform_int(0, n - 1)](zt, ze) = 0.0;
      Eigen::MatrixXd f = fuse(spec, bs, steps);
      if (f(zt, ze) != 0.0) return {false, "product ignores a zero factor"};
      for (int t = 0; t < T; ++t)
        for (int e = 0; e < E; ++e) {
          double p = 1.0;
          for (int i = 0; i < n; ++i) p *= bs[i](t, e);
          if (rel_err(f(t, e), p) > 1e-12 && f(t, e) != p)
            return {false, "product drifts from the elementwise product"};
        }
    }

    // summation: positively homogeneous in the bonuses
    {
      std::vector<double> w(n);
      for (auto& x : w) x = 0.25 + rng.uniform();
      FusionSpec spec{Strategy::Summation, members(n), w, 0.25, 0.0};
      auto bs = rand_bonuses(n, T, E, false);
      double lam = 0.5 + 2.0 * rng.uniform();
      auto scaled = bs;
      for (auto& b : scaled) b *= lam;
      Eigen::MatrixXd f1 = fuse(spec, bs, steps);
      Eigen::MatrixXd f2 = fuse(spec, scaled, steps);
      if (((f2 - lam * f1).cwiseAbs().maxCoeff()) > 1e-9 * std::max(1.0, lam))
        return {false, "summation is not homogeneous"};
    }

    // cycle: member index steps mod n, visiting each exactly T/n times
    {
      FusionSpec spec{Strategy::Cycle, members(n), {}, 0.25, 0.0};
      std::vector<Eigen::MatrixXd> bs(n);
      for (int i = 0; i < n; ++i)
        bs[i] = Eigen::MatrixXd::Constant(T, E, i + 1.0);
      Eigen::MatrixXd f = fuse(spec, bs, steps);
      std::vector<int> counts(n, 0);
      for (int t = 0; t < T; ++t) {
        int want = static_cast<int>(steps(t, 0) % n);
        for (int e = 0; e < E; ++e)
          if (f(t, e) != want + 1.0)
            return {false, "cycle picked the wrong member"};
        ++counts[want];
      }
      for (int i = 0; i < n; ++i)
        if (counts[i] != T / n)
          return {false, fmt("cycle partition %d != %d", counts[i], T / n)};
    }

    // one-hot summation reduces to the selected member alone
    {
      int j = static_cast<int>(rng.uniform_int(0, n - 1));
      std::vector<double> w(n, 0.0);
      w[j] = 1.0;
      FusionSpec spec{Strategy::Summation, members(n), w, 0.25, 0.0};
      auto bs = rand_bonuses(n, T, E, false);
      Eigen::MatrixXd f = fuse(spec, bs, steps);
      if ((f - bs[j]).cwiseAbs().maxCoeff() != 0.0)
        return {false, "one-hot summation is not the selected member"};
    }
  }
  return {true, "1000 cases per law"};
}

// ---------------------------------------------------------------------------
// 6. Candidate combinatorics: 11 hybrids per strategy over 4 rewards, 49
// grid entries in total.

Outcome check_candidate_grid() {
  const std::vector<std::string> names = {"ICM", "NGU", "RE3", "E3B"};
  auto hybrids = enumerate_candidates(names, {Strategy::Summation}, false,
                                      false);
  if (hybrids.size() != 11)
    return {false, fmt("%zu hybrids per strategy, want 11", hybrids.size())};

  std::set<std::set<std::string>> got;
  for (const auto& h : hybrids)
    got.insert(std::set<std::string>(h.fusion.members.begin(),
                                     h.fusion.members.end()));
  std::set<std::set<std::string>> want;
  for (int m = 1; m < 16; ++m) {
    std::set<std::string> s;
    for (int i = 0; i < 4; ++i)
      if (m & (1 << i)) s.insert(names[i]);
    if (s.size() >= 2) want.insert(s);
  }
  if (got != want) return {false, "hybrid member sets mismatch"};

  auto full = enumerate_candidates(
      names,
      {Strategy::Summation, Strategy::Product, Strategy::Cycle,
       Strategy::Maximum},
      true, true);
  if (full.size() != 49)
    return {false, fmt("%zu grid entries, want 49", full.size())};
  std::set<std::string> labels;
  for (const auto& c : full) labels.insert(c.label());
  if (labels.size() != 49) return {false, "duplicate labels in the grid"};
  return {true, "11 member sets per strategy, 49 labeled grid entries"};
}

// ---------------------------------------------------------------------------
// 7. Weight schedule: constant when undecayed, exact halving, and bit-exact
// agreement between the closed form and the running recursion.

Outcome check_beta_schedule() {
  for (int64_t t : {int64_t{0}, int64_t{1}, int64_t{17}, int64_t{1000},
                    int64_t{250000}, int64_t{1000000}})
    if (beta_value(0.25, 0.0, t) != 0.25)
      return {false, fmt("undecayed schedule moved at t=%lld",
                         static_cast<long long>(t))};
  if (beta_value(1.0, 0.5, 2) != 0.25)
    return {false, "halving schedule is not exactly 0.25 at t=2"};

  double beta0 = 0.25, kappa = 3e-6;
  BetaSchedule sched(beta0, kappa);
  double mine = beta0;
  for (int64_t t = 0; t < 1000000; ++t) {
    if (sched.value() != mine)
      return {false, fmt("recursion diverged at t=%lld",
                         static_cast<long long>(t))};
    sched.advance();
    mine *= 1.0 - kappa;
  }
  if (sched.value() != mine) return {false, "recursion diverged at t=1e6"};
  for (int64_t t : {int64_t{1}, int64_t{1000}, int64_t{999999},
                    int64_t{1000000}}) {
    double direct = beta_value(beta0, kappa, t);
    double run = beta0;
    for (int64_t i = 0; i < t; ++i) run *= 1.0 - kappa;
    if (direct != run)
      return {false, fmt("closed form departs from the recursion at t=%lld",
                         static_cast<long long>(t))};
  }
  return {true, "bit-exact over 1e6 steps"};
}

// ---------------------------------------------------------------------------
// 8. Exploration separation on connected rooms: the rotation hybrid of the
// two episodic bonuses must solve what the extrinsic baseline cannot.

ExperimentConfig rooms_config(const std::string& candidate,
                              const std::string& out_dir) {
  nlohmann::json j = {
      {"env", {{"family", "MultiRoom"}, {"n_rooms", 4}, {"room_size", 5}}},
      {"candidate", candidate},
      {"beta0", 0.5},
      {"kappa", 1.5e-4},
      {"ppo", {{"total_steps", 500000}, {"n_envs", 16}}},
      {"seeds", {1, 2, 3, 4, 5}},
      {"out_dir", out_dir},
  };
  return ExperimentConfig::from_json(j);
}

Outcome check_exploration_separation() {
  std::string dir = work_dir() + "/separation";
  fs::remove_all(dir);
  auto ext_cfg = rooms_config("Extrinsic", dir);
  auto hyb_cfg = rooms_config("C(NGU, RE3)", dir);
  auto ext = run_experiment(ext_cfg, parse_candidate("Extrinsic"));
  auto hyb = run_experiment(hyb_cfg, parse_candidate("C(NGU, RE3)"));

  auto rates = [](const nlohmann::json& s) {
    std::map<uint64_t, double> by_seed;
    for (const auto& r : s.at("runs"))
      by_seed[r.at("seed").get<uint64_t>()] =
          r.at("success_rate").get<double>();
    return by_seed;
  };
  auto er = rates(ext), hr = rates(hyb);
  int good = 0;
  std::string detail;
  for (uint64_t seed : {1, 2, 3, 4, 5}) {
    bool ok = er.count(seed) && hr.count(seed) && er[seed] < 0.1 &&
              hr[seed] >= 0.6;
    good += ok ? 1 : 0;
    detail += fmt("s%llu ext %.2f hyb %.2f%s; ",
                  static_cast<unsigned long long>(seed), er[seed], hr[seed],
                  ok ? "" : " X");
  }
  return {good >= 4, detail + fmt("(%d/5 separated)", good)};
}

// ---------------------------------------------------------------------------
// 9. Throughput ordering: every added bonus model must cost frames.

Outcome check_fps_ordering() {
  ExperimentConfig cfg;
  nlohmann::json j = {
      {"env", {{"family", "MultiRoom"}, {"n_rooms", 4}, {"room_size", 5}}},
      {"out_dir", work_dir() + "/fps"},
  };
  cfg = ExperimentConfig::from_json(j);
  std::vector<std::string> ladder = {"ICM", "S(ICM, NGU)",
                                     "S(ICM, NGU, RE3)",
                                     "S(ICM, NGU, RE3, E3B)"};
  auto entries = bench_fps(cfg, ladder, 12.0, 3);
  std::string detail;
  for (const auto& e : entries)
    detail += fmt("%d: %.0f fps; ", e.n_members, e.median_fps);
  for (size_t i = 0; i + 1 < entries.size(); ++i) {
    if (entries[i].n_members != static_cast<int>(i + 1))
      return {false, "ladder member counts off"};
    double hi = entries[i].median_fps, lo = entries[i + 1].median_fps;
    if (!(hi > lo * 1.02))
      return {false, detail + fmt("gap %zu->%zu below 2%%", i + 1, i + 2)};
  }
  return {true, detail};
}

// ---------------------------------------------------------------------------
// 10. Aggregate statistics: the interquartile mean, its stratified
// bootstrap interval, score distribution curves, and share-of-top tallies.

RunMatrix synthetic_matrix() {
  Rng rng(424242);
  RunMatrix m;
  for (uint64_t seed = 1; seed <= 50; ++seed)
    m.add({"rooms", "X", "X", "Baseline", 1, seed,
           0.5 + 0.1 * rng.normal()});
  return m;
}

Outcome check_aggregate_statistics() {
  if (iqm({1.0, 2.0, 3.0, 4.0}) != 2.5)
    return {false, "iqm([1,2,3,4]) is not 2.5"};

  RunMatrix m = synthetic_matrix();
  auto [lo, hi] = stratified_bootstrap_ci(m, "X", 2000, 0.95, 12345);
  if (!(lo <= 0.5 && 0.5 <= hi))
    return {false, fmt("CI [%.4f, %.4f] misses the true center", lo, hi)};
  if (!(hi - lo < 0.1))
    return {false, fmt("CI width %.4f is not < 0.1", hi - lo)};

  // a small mixed grid exercises the per-tag tallies and the curves
  RunMatrix g;
  Rng rng(31337);
  std::vector<std::pair<std::string, std::string>> cands = {
      {"Extrinsic", "Extrinsic"}, {"ICM", "Baseline"},
      {"S(ICM, NGU)", "Summation"}, {"P(NGU, RE3)", "Product"},
      {"C(NGU, RE3)", "Cycle"},     {"M(ICM, E3B)", "Maximum"}};
  for (const auto& task : {"t1", "t2"})
    for (const auto& [label, tag] : cands) {
      auto spec = parse_candidate(label);
      for (uint64_t seed = 1; seed <= 5; ++seed)
        g.add({task, label, spec.short_label(), tag, spec.n_members(), seed,
               rng.uniform()});
    }
  for (const auto& shares : top_k_proportions(g, {1, 3, 5})) {
    double total = 0.0;
    for (const auto& [tag, v] : shares.share_by_tag) total += v;
    if (std::abs(total - 1.0) > 1e-9)
      return {false, fmt("top-%d shares sum to %.12f", shares.k, total)};
  }
  for (const auto& curve : performance_cdf(g)) {
    if (curve.tau.size() != 101 || curve.fraction.size() != 101)
      return {false, "curve is not sampled at 101 points"};
    if (curve.fraction[0] != 1.0)
      return {false, "curve does not start at fraction 1"};
    for (size_t i = 1; i < curve.fraction.size(); ++i)
      if (curve.fraction[i] > curve.fraction[i - 1] + 1e-15)
        return {false, "curve increases"};
  }
  return {true, fmt("iqm exact; CI [%.3f, %.3f]; shares and curves hold",
                    lo, hi)};
}

// ---------------------------------------------------------------------------
// 11. Determinism: one config, one seed, two processes' worth of state,
// byte-identical metrics.

Outcome check_determinism() {
  std::string d1 = work_dir() + "/det_a", d2 = work_dir() + "/det_b";
  fs::remove_all(d1);
  fs::remove_all(d2);
  auto one_seed = [&](const std::string& out) {
    auto cfg = rooms_config("C(NGU, RE3)", out);
    cfg.seeds = {1};
    return cfg;
  };
  auto cand = parse_candidate("C(NGU, RE3)");
  auto cfg1 = one_seed(d1);
  auto cfg2 = one_seed(d2);
  run_experiment(cfg1, cand);
  run_experiment(cfg2, cand);
  std::string f1 = run_dir(cfg1, cand) + "/seed1.metrics.csv";
  std::string f2 = run_dir(cfg2, cand) + "/seed1.metrics.csv";
  std::string a = slurp(f1), b = slurp(f2);
  if (a != b)
    return {false, fmt("metrics differ (%zu vs %zu bytes)", a.size(),
                       b.size())};
  return {true, fmt("%zu bytes identical across independent runs",
                    a.size())};
}

// ---------------------------------------------------------------------------
// 12. Phase purity: in the emitted metrics, pretraining optimizes exactly
// the decayed bonus stream and finetuning exactly the task reward.

Outcome check_phase_purity() {
  std::string dir = work_dir() + "/phases";
  fs::remove_all(dir);
  nlohmann::json j = {
      {"env", {{"family", "MultiRoom"}, {"n_rooms", 2}, {"room_size", 4}}},
      {"candidate", "S(ICM, RE3)"},
      {"beta0", 0.25},
      {"kappa", 1e-3},
      {"ppo",
       {{"total_steps", 2048},
        {"n_envs", 4},
        {"rollout_len", 8},
        {"minibatch", 16},
        {"hidden", {32}}}},
      {"phases", {{"pretrain_steps", 1024}, {"finetune_steps", 1024}}},
      {"seeds", {3}},
      {"out_dir", dir},
  };
  auto cfg = ExperimentConfig::from_json(j);
  auto cand = parse_candidate("S(ICM, RE3)");
  run_experiment(cfg, cand);

  std::ifstream f(run_dir(cfg, cand) + "/seed3.metrics.csv");
  if (!f) return {false, "metrics file missing"};
  std::string line;
  std::vector<std::string> header;
  std::map<std::string, int> col;
  int pre_rows = 0, fine_rows = 0;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto fields = csv_split(line);
    if (header.empty()) {
      header = fields;
      for (size_t i = 0; i < fields.size(); ++i)
        col[fields[i]] = static_cast<int>(i);
      for (const char* need : {"phase", "combined_mean", "extrinsic_mean",
                               "beta_intrinsic_mean", "beta"})
        if (!col.count(need)) return {false, fmt("column %s missing", need)};
      continue;
    }
    const std::string& phase = fields[col["phase"]];
    if (phase == "pretrain") {
      ++pre_rows;
      if (fields[col["combined_mean"]] != fields[col["beta_intrinsic_mean"]])
        return {false, "pretraining reward is not the decayed bonus"};
    } else if (phase == "finetune") {
      ++fine_rows;
      if (fields[col["combined_mean"]] != fields[col["extrinsic_mean"]])
        return {false, "finetuning reward is not the task reward"};
      if (fields[col["beta"]] != "0")
        return {false, "finetuning beta is not zero"};
    } else {
      return {false, "unexpected phase label " + phase};
    }
  }
  if (pre_rows == 0 || fine_rows == 0)
    return {false, "a phase emitted no rows"};
  return {true, fmt("%d pretraining + %d finetuning rows pure", pre_rows,
                    fine_rows)};
}

}  // namespace

int main(int argc, char** argv) {
  struct Check {
    int id;
    const char* name;
    std::function<Outcome()> fn;
  };
  std::vector<Check> checks = {
      {1, "neighbor-search parity with the quadratic scan", check_knn_parity},
      {2, "ellipsoid inverse parity with direct inversion",
       check_ellipsoid_parity},
      {3, "learned-model gradients match finite differences",
       check_gradient_parity},
      {4, "advantage recursion matches the direct sum", check_gae_parity},
      {5, "fusion strategy algebra", check_fusion_algebra},
      {6, "candidate grid combinatorics", check_candidate_grid},
      {7, "bonus weight schedule", check_beta_schedule},
      {8, "exploration separation on connected rooms",
       check_exploration_separation},
      {9, "throughput ordering across hybrid sizes", check_fps_ordering},
      {10, "aggregate statistics pipeline", check_aggregate_statistics},
      {11, "byte-identical reruns", check_determinism},
      {12, "phase reward purity", check_phase_purity},
  };

  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  fs::create_directories(work_dir());
  int failures = 0;
  for (const auto& c : checks) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.fn();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    std::printf("[%s] %2d %s (%.1fs) %s\n", out.ok ? "PASS" : "FAIL", c.id,
                c.name, secs, out.detail.c_str());
    std::fflush(stdout);
    failures += out.ok ? 0 : 1;
  }
  std::printf("%s: %d failure%s\n", failures == 0 ? "ACCEPTED" : "REJECTED",
              failures, failures == 1 ? "" : "s");
  return failures;
}
