#include "hire/rewards/module.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "hire/rewards/e3b.hpp"
#include "hire/rewards/icm.hpp"
#include "hire/rewards/ngu.hpp"
#include "hire/rewards/re3.hpp"

namespace hire {

std::vector<int64_t> subsample_indices(int64_t n, double proportion,
                                       Rng& rng) {
  if (!(proportion > 0.0) || proportion > 1.0)
    throw std::invalid_argument("update proportion must be in (0, 1]");
  if (n <= 0) return {};
  std::vector<int64_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  if (proportion == 1.0) return idx;
  int64_t take = std::max<int64_t>(1, std::llround(proportion * n));
  for (int64_t i = 0; i < take; ++i) {
    int64_t j = i + rng.uniform_int(0, n - 1 - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(take);
  return idx;
}

std::string canonical_module_name(const std::string& name) {
  if (name == "ICM" || name == "I") return "ICM";
  if (name == "NGU" || name == "N") return "NGU";
  if (name == "RE3" || name == "R") return "RE3";
  if (name == "E3B" || name == "E") return "E3B";
  throw std::invalid_argument("unknown reward module: " + name);
}

std::unique_ptr<RewardModule> make_reward_module(
    const std::string& name, int obs_dim, int n_actions, int n_envs,
    const nlohmann::json& cfg, uint64_t seed) {
  std::string canon = canonical_module_name(name);
  if (canon == "ICM") {
    IcmConfig c;
    c.emb_dim = cfg.value("emb_dim", c.emb_dim);
    c.hidden = cfg.value("hidden", c.hidden);
    c.lr = cfg.value("lr", c.lr);
    c.forward_coef = cfg.value("forward_coef", c.forward_coef);
    c.inverse_coef = cfg.value("inverse_coef", c.inverse_coef);
    return std::make_unique<Icm>(obs_dim, n_actions, c, seed);
  }
  if (canon == "NGU") {
    NguConfig c;
    c.emb_dim = cfg.value("emb_dim", c.emb_dim);
    c.hidden = cfg.value("hidden", c.hidden);
    c.k = cfg.value("k", c.k);
    c.C = cfg.value("C", c.C);
    c.c = cfg.value("c", c.c);
    c.eps_k = cfg.value("eps_k", c.eps_k);
    c.lr = cfg.value("lr", c.lr);
    return std::make_unique<Ngu>(obs_dim, n_actions, n_envs, c, seed);
  }
  if (canon == "RE3") {
    Re3Config c;
    c.emb_dim = cfg.value("emb_dim", c.emb_dim);
    c.hidden = cfg.value("hidden", c.hidden);
    c.k = cfg.value("k", c.k);
    return std::make_unique<Re3>(obs_dim, n_actions, c, seed);
  }
  E3bConfig c;
  c.emb_dim = cfg.value("emb_dim", c.emb_dim);
  c.hidden = cfg.value("hidden", c.hidden);
  c.lambda = cfg.value("lambda", c.lambda);
  c.lr = cfg.value("lr", c.lr);
  return std::make_unique<E3b>(obs_dim, n_actions, n_envs, c, seed);
}

}  // namespace hire
