#include <cstdlib>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>

#include "hire/harness/experiment.hpp"

namespace hire {

namespace {

void check_keys(const nlohmann::json& j,
                const std::set<std::string>& allowed, const char* where) {
  if (!j.is_object())
    throw std::runtime_error(std::string(where) + " must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key))
      throw std::runtime_error(std::string("unknown key \"") + key +
                               "\" in " + where);
}

GridSpec env_from_json(const nlohmann::json& j) {
  check_keys(j,
             {"family", "n_rooms", "room_size", "grid_w", "grid_h",
              "max_steps", "n_obstacles"},
             "env");
  GridSpec s;
  if (j.contains("family")) s.family = family_from_name(j.at("family"));
  s.n_rooms = j.value("n_rooms", s.n_rooms);
  s.room_size = j.value("room_size", s.room_size);
  s.grid_w = j.value("grid_w", s.grid_w);
  s.grid_h = j.value("grid_h", s.grid_h);
  s.max_steps = j.value("max_steps", s.max_steps);
  s.n_obstacles = j.value("n_obstacles", s.n_obstacles);
  return s;
}

PpoConfig ppo_from_json(const nlohmann::json& j) {
  check_keys(j,
             {"rollout_len", "n_envs", "lr", "gamma", "gae_lambda",
              "entropy_coef", "value_coef", "clip_range", "max_grad_norm",
              "epochs", "minibatch", "total_steps", "hidden"},
             "ppo");
  PpoConfig c;
  c.rollout_len = j.value("rollout_len", c.rollout_len);
  c.n_envs = j.value("n_envs", c.n_envs);
  c.lr = j.value("lr", c.lr);
  c.gamma = j.value("gamma", c.gamma);
  c.gae_lambda = j.value("gae_lambda", c.gae_lambda);
  c.entropy_coef = j.value("entropy_coef", c.entropy_coef);
  c.value_coef = j.value("value_coef", c.value_coef);
  c.clip_range = j.value("clip_range", c.clip_range);
  c.max_grad_norm = j.value("max_grad_norm", c.max_grad_norm);
  c.epochs = j.value("epochs", c.epochs);
  c.minibatch = j.value("minibatch", c.minibatch);
  c.total_steps = j.value("total_steps", c.total_steps);
  if (j.contains("hidden"))
    c.hidden = j.at("hidden").get<std::vector<int>>();
  return c;
}

SweepGrid grid_from_json(const nlohmann::json& j) {
  check_keys(j, {"rewards", "strategies", "include_singles",
                 "include_extrinsic"},
             "grid");
  SweepGrid g;
  g.enabled = true;
  if (j.contains("rewards"))
    g.rewards = j.at("rewards").get<std::vector<std::string>>();
  if (j.contains("strategies")) {
    g.strategies.clear();
    for (const auto& tok : j.at("strategies"))
      g.strategies.push_back(strategy_from_token(tok.get<std::string>()));
  }
  g.include_singles = j.value("include_singles", true);
  g.include_extrinsic = j.value("include_extrinsic", true);
  return g;
}

}  // namespace

void PhaseSchedule::validate() const {
  if (pretrain_steps < 0 || finetune_steps < 0)
    throw std::invalid_argument("phase step counts must be >= 0");
}

void ExperimentConfig::validate() const {
  env.validate();
  ppo.validate();
  phases.validate();
  if (!(beta0 > 0.0)) throw std::invalid_argument("beta0 must be > 0");
  if (!(kappa >= 0.0 && kappa < 1.0))
    throw std::invalid_argument("kappa must be in [0, 1)");
  if (seeds.empty()) throw std::invalid_argument("seeds list is empty");
  if (out_dir.empty()) throw std::invalid_argument("out_dir is empty");
  if (!(module_update_proportion > 0.0 && module_update_proportion <= 1.0))
    throw std::invalid_argument(
        "module_update_proportion must be in (0, 1]");
  // every sweep label must parse
  for (const std::string& label : sweep_labels()) parse_candidate(label);
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  check_keys(j,
             {"env", "candidate", "candidates", "grid", "beta0", "kappa",
              "ppo", "seeds", "phases", "out_dir", "modules",
              "module_update_proportion"},
             "config");
  ExperimentConfig c;
  if (j.contains("env")) c.env = env_from_json(j.at("env"));
  c.candidate = j.value("candidate", c.candidate);
  if (j.contains("candidates"))
    c.candidates = j.at("candidates").get<std::vector<std::string>>();
  if (j.contains("grid")) c.grid = grid_from_json(j.at("grid"));
  c.beta0 = j.value("beta0", c.beta0);
  c.kappa = j.value("kappa", c.kappa);
  if (j.contains("ppo")) c.ppo = ppo_from_json(j.at("ppo"));
  if (j.contains("seeds"))
    c.seeds = j.at("seeds").get<std::vector<uint64_t>>();
  if (j.contains("phases")) {
    const auto& p = j.at("phases");
    check_keys(p, {"pretrain_steps", "finetune_steps"}, "phases");
    c.phases.pretrain_steps = p.value("pretrain_steps", int64_t{0});
    c.phases.finetune_steps = p.value("finetune_steps", int64_t{0});
  }
  c.out_dir = j.value("out_dir", c.out_dir);
  if (j.contains("modules")) {
    c.modules = j.at("modules");
    if (!c.modules.is_object())
      throw std::runtime_error("modules must be a JSON object");
  }
  c.module_update_proportion =
      j.value("module_update_proportion", c.module_update_proportion);
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  ExperimentConfig c = from_json(j);
  if (const char* dir = std::getenv("HIRE_OUT_DIR"); dir && *dir)
    c.out_dir = dir;
  return c;
}

nlohmann::ordered_json ExperimentConfig::to_json() const {
  nlohmann::ordered_json j;
  j["env"] = {{"family", family_name(env.family)},
              {"n_rooms", env.n_rooms},
              {"room_size", env.room_size},
              {"grid_w", env.grid_w},
              {"grid_h", env.grid_h},
              {"max_steps", env.max_steps},
              {"n_obstacles", env.n_obstacles}};
  j["candidate"] = candidate;
  if (!candidates.empty()) j["candidates"] = candidates;
  if (grid.enabled) {
    std::vector<std::string> toks;
    for (Strategy s : grid.strategies) toks.emplace_back(1, strategy_letter(s));
    j["grid"] = {{"rewards", grid.rewards},
                 {"strategies", toks},
                 {"include_singles", grid.include_singles},
                 {"include_extrinsic", grid.include_extrinsic}};
  }
  j["beta0"] = beta0;
  j["kappa"] = kappa;
  j["ppo"] = {{"rollout_len", ppo.rollout_len},
              {"n_envs", ppo.n_envs},
              {"lr", ppo.lr},
              {"gamma", ppo.gamma},
              {"gae_lambda", ppo.gae_lambda},
              {"entropy_coef", ppo.entropy_coef},
              {"value_coef", ppo.value_coef},
              {"clip_range", ppo.clip_range},
              {"max_grad_norm", ppo.max_grad_norm},
              {"epochs", ppo.epochs},
              {"minibatch", ppo.minibatch},
              {"total_steps", ppo.total_steps},
              {"hidden", ppo.hidden}};
  j["seeds"] = seeds;
  j["phases"] = {{"pretrain_steps", phases.pretrain_steps},
                 {"finetune_steps", phases.finetune_steps}};
  j["out_dir"] = out_dir;
  j["modules"] = modules;
  j["module_update_proportion"] = module_update_proportion;
  return j;
}

std::vector<std::string> ExperimentConfig::sweep_labels() const {
  if (grid.enabled) {
    std::vector<std::string> out;
    for (const CandidateSpec& c :
         enumerate_candidates(grid.rewards, grid.strategies,
                              grid.include_singles, grid.include_extrinsic))
      out.push_back(c.label());
    return out;
  }
  if (!candidates.empty()) return candidates;
  return {candidate};
}

std::string file_label(const CandidateSpec& cand) {
  if (cand.extrinsic_only) return "Ext";
  if (cand.is_single()) return cand.fusion.members[0];
  std::string s(1, strategy_letter(cand.fusion.strategy));
  s += '_';
  for (const std::string& m : cand.fusion.members) s += m[0];
  return s;
}

std::string candidate_tag(const CandidateSpec& cand) {
  if (cand.extrinsic_only) return "Extrinsic";
  if (cand.is_single()) return "Baseline";
  return strategy_name(cand.fusion.strategy);
}

std::string run_dir(const ExperimentConfig& cfg, const CandidateSpec& cand) {
  return cfg.out_dir + "/" + cfg.env.task_label() + "/" + file_label(cand);
}

}  // namespace hire
