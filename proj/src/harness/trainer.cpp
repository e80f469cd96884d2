#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "hire/fusion/fusion.hpp"
#include "hire/grid/vec_env.hpp"
#include "hire/harness/experiment.hpp"
#include "hire/nn/checkpoint.hpp"
#include "hire/rewards/module.hpp"
#include "hire/util/io.hpp"

namespace hire {

namespace {

enum class Phase { Mixed, Pretrain, Finetune };

const char* phase_name(Phase p) {
  switch (p) {
    case Phase::Mixed: return "mixed";
    case Phase::Pretrain: return "pretrain";
    default: return "finetune";
  }
}

struct IterStats {
  int64_t episodes = 0;
  int64_t successes = 0;
  double return_sum = 0.0;
};

double secs_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// Per-run training state shared by the full runs and the FPS bench.
struct TrainLoop {
  const ExperimentConfig& cfg;
  CandidateSpec cand;
  FusionSpec fspec;  // candidate fusion with the run's beta0/kappa applied
  VectorEnv env;
  PpoLearner learner;
  std::vector<std::unique_ptr<RewardModule>> mods;
  Rng act_rng, upd_rng;
  Rollout roll;
  BetaSchedule beta;
  int64_t row_count = 0;  // per-env rows processed so far, the beta index
  Eigen::ArrayXd ep_return;

  // per-iteration outputs
  IterStats stats;
  std::vector<double> raw_means, norm_means;
  double beta_first = 0.0;  // beta at the iteration's first row
  double extrinsic_mean = 0.0, combined_mean = 0.0;
  double fused_mean = 0.0, beta_intrinsic_mean = 0.0;
  PpoUpdateStats update_stats;

  TrainLoop(const ExperimentConfig& c, const CandidateSpec& cd, uint64_t seed)
      : cfg(c),
        cand(cd),
        fspec(cd.fusion),
        env(c.env, c.ppo.n_envs, derive_seed(seed, 100)),
        learner(kObsDim, kNumActions, c.ppo, derive_seed(seed, 200)),
        act_rng(derive_seed(seed, 300)),
        upd_rng(derive_seed(seed, 400)),
        beta(c.beta0, c.kappa),
        ep_return(Eigen::ArrayXd::Zero(c.ppo.n_envs)) {
    fspec.beta0 = c.beta0;
    fspec.kappa = c.kappa;
    if (!cand.extrinsic_only) {
      fspec.validate();
      for (size_t i = 0; i < fspec.members.size(); ++i)
        mods.push_back(make_reward_module(fspec.members[i], kObsDim,
                                          kNumActions, c.ppo.n_envs,
                                          c.modules, derive_seed(seed, 500 + i)));
    }
    roll.allocate(kObsDim, c.ppo.rollout_len, c.ppo.n_envs);
    roll.obs_at(0) = env.reset();
  }

  // One collect / score / fuse / update cycle under the given phase.
  void iterate(Phase phase) {
    const int T = roll.T, E = roll.E;
    const bool use_beta =
        !cand.extrinsic_only && phase != Phase::Finetune;
    Eigen::ArrayXd beta_row(T);
    stats = IterStats{};

    std::vector<int> actions(E);
    for (int t = 0; t < T; ++t) {
      roll.steps.row(t).setConstant(row_count);
      beta_row(t) = use_beta ? beta.value() : 0.0;
      if (use_beta) beta.advance();
      if (t == 0) beta_first = beta_row(0);

      Matf obs_f = roll.obs_at(t).cast<float>();
      Matf logits, values;
      policy_value(learner.net, obs_f, &logits, &values);
      for (int e = 0; e < E; ++e) {
        double lp = 0.0;
        int a = sample_categorical(Vecf(logits.col(e)), act_rng, &lp);
        actions[e] = a;
        roll.actions(t, e) = a;
        roll.logprobs(t, e) = lp;
        roll.values(t, e) = values(0, e);
      }
      StepBatch sb = env.step(actions);
      roll.extrinsic.row(t) = sb.reward.transpose();
      roll.obs_at(t + 1) = sb.obs;
      for (int e = 0; e < E; ++e) {
        bool boundary = sb.episode_boundary[e] != 0;
        roll.dones(t, e) = boundary ? 1.0 : 0.0;
        ep_return(e) += sb.reward(e);
        if (boundary) {
          ++stats.episodes;
          stats.return_sum += ep_return(e);
          if (sb.terminal[e] && sb.reward(e) > 0.0) ++stats.successes;
          ep_return(e) = 0.0;
        }
      }
      ++row_count;
    }
    Matf obs_f = roll.obs_at(T).cast<float>();
    Matf values;
    policy_value<float>(learner.net, obs_f, nullptr, &values);
    roll.values.row(T) = values.row(0).cast<double>();

    raw_means.clear();
    norm_means.clear();
    std::vector<Eigen::MatrixXd> bonuses;
    for (auto& m : mods) {
      BonusResult br = m->compute(roll);
      raw_means.push_back(br.raw.mean());
      norm_means.push_back(br.norm.mean());
      bonuses.push_back(std::move(br.norm));
    }
    fused_mean = 0.0;
    beta_intrinsic_mean = 0.0;
    Eigen::MatrixXd fused;
    if (!mods.empty()) {
      fused = fuse(fspec, bonuses, roll.steps);
      fused_mean = fused.mean();
      Eigen::MatrixXd beta_intr =
          (fused.array().colwise() * beta_row).matrix();
      beta_intrinsic_mean = beta_intr.mean();
    }
    switch (phase) {
      case Phase::Mixed:
        roll.combined = cand.extrinsic_only
                            ? roll.extrinsic
                            : combine(roll.extrinsic, fused, beta_row);
        break;
      case Phase::Pretrain:
        roll.combined = (fused.array().colwise() * beta_row).matrix();
        break;
      case Phase::Finetune:
        roll.combined = roll.extrinsic;
        break;
    }
    extrinsic_mean = roll.extrinsic.mean();
    combined_mean = roll.combined.mean();

    for (auto& m : mods) m->update(roll, cfg.module_update_proportion);
    compute_gae(roll, cfg.ppo.gamma, cfg.ppo.gae_lambda);
    update_stats = learner.update(roll, upd_rng);

    roll.obs_at(0) = roll.obs_at(T);
  }

  // Phase boundary: checkpoint the policy nets, prove the round-trip by
  // reloading them, restart every env on a fresh episode and clear the
  // modules' episodic state. Learned parameters carry over.
  void phase_boundary(const std::string& ckpt_prefix) {
    save_checkpoint(ckpt_prefix,
                    {{"trunk", &learner.net.trunk},
                     {"pi_head", &learner.net.pi_head},
                     {"v_head", &learner.net.v_head}},
                    {});
    Checkpoint ck = load_checkpoint(ckpt_prefix);
    learner.net.trunk = ck.nets.at("trunk");
    learner.net.pi_head = ck.nets.at("pi_head");
    learner.net.v_head = ck.nets.at("v_head");
    roll.obs_at(0) = env.reset();
    for (auto& m : mods)
      for (int e = 0; e < roll.E; ++e) m->on_episode_boundary(e);
    ep_return.setZero();
  }
};

int64_t iters_for(int64_t steps, int64_t frames_per_iter) {
  return (steps + frames_per_iter - 1) / frames_per_iter;
}

}  // namespace

RunResult run_single(const ExperimentConfig& cfg, const CandidateSpec& cand,
                     uint64_t seed, const std::string& dir) {
  if (cfg.phases.phased() && cand.extrinsic_only)
    throw std::invalid_argument(
        "a phased schedule needs at least one intrinsic member");

  const int64_t fpi =
      int64_t{cfg.ppo.rollout_len} * int64_t{cfg.ppo.n_envs};
  const bool phased = cfg.phases.phased();
  const int64_t pre_iters =
      phased ? iters_for(cfg.phases.pretrain_steps, fpi) : 0;
  const int64_t fine_iters =
      phased ? iters_for(cfg.phases.finetune_steps, fpi) : 0;
  const int64_t n_iters =
      phased ? pre_iters + fine_iters : iters_for(cfg.ppo.total_steps, fpi);

  const std::string tag = "seed" + std::to_string(seed);
  std::filesystem::create_directories(dir);

  std::vector<std::string> header{"candidate", "seed",         "phase",
                                  "iter",      "global_step",  "beta",
                                  "episodes",  "ep_return_mean",
                                  "success_rate", "extrinsic_mean",
                                  "combined_mean"};
  TrainLoop loop(cfg, cand, seed);
  if (!loop.mods.empty()) {
    header.push_back("beta_intrinsic_mean");
    for (const auto& m : loop.mods) {
      header.push_back("raw_" + m->name() + "_mean");
      header.push_back("norm_" + m->name() + "_mean");
    }
    header.push_back("fused_mean");
  }
  for (const char* c : {"policy_loss", "value_loss", "entropy", "clip_frac",
                        "approx_kl", "grad_norm"})
    header.push_back(c);

  CsvWriter metrics(dir + "/" + tag + ".metrics.csv", header,
                    "hire metrics v1");
  CsvWriter timing(dir + "/" + tag + ".timing.csv",
                   {"iter", "frames", "seconds", "fps"}, "hire timing v1");

  std::vector<IterStats> history;
  history.reserve(static_cast<size_t>(n_iters));
  for (int64_t iter = 0; iter < n_iters; ++iter) {
    Phase phase = !phased ? Phase::Mixed
                          : (iter < pre_iters ? Phase::Pretrain
                                              : Phase::Finetune);
    if (phased && iter == pre_iters && pre_iters > 0)
      loop.phase_boundary(dir + "/" + tag + ".boundary");

    auto t0 = std::chrono::steady_clock::now();
    loop.iterate(phase);
    double secs = secs_since(t0);
    history.push_back(loop.stats);

    std::vector<std::string> row{
        cand.label(),
        std::to_string(seed),
        phase_name(phase),
        std::to_string(iter),
        std::to_string((iter + 1) * fpi),
        fmt_double(loop.beta_first),
        std::to_string(loop.stats.episodes),
        fmt_double(loop.stats.episodes
                       ? loop.stats.return_sum / loop.stats.episodes
                       : 0.0),
        fmt_double(loop.stats.episodes
                       ? static_cast<double>(loop.stats.successes) /
                             loop.stats.episodes
                       : 0.0),
        fmt_double(loop.extrinsic_mean),
        fmt_double(loop.combined_mean)};
    if (!loop.mods.empty()) {
      row.push_back(fmt_double(loop.beta_intrinsic_mean));
      for (size_t i = 0; i < loop.mods.size(); ++i) {
        row.push_back(fmt_double(loop.raw_means[i]));
        row.push_back(fmt_double(loop.norm_means[i]));
      }
      row.push_back(fmt_double(loop.fused_mean));
    }
    const PpoUpdateStats& us = loop.update_stats;
    for (double v : {us.policy_loss, us.value_loss, us.entropy, us.clip_frac,
                     us.approx_kl, us.grad_norm})
      row.push_back(fmt_double(v));
    metrics.write_row(row);

    char sec_buf[32], fps_buf[32];
    std::snprintf(sec_buf, sizeof(sec_buf), "%.6f", secs);
    std::snprintf(fps_buf, sizeof(fps_buf), "%.1f",
                  secs > 0 ? static_cast<double>(fpi) / secs : 0.0);
    timing.write_row({std::to_string(iter), std::to_string(fpi), sec_buf,
                      fps_buf});
  }

  // final score: pooled episodes over the last 10% of iterations
  int64_t window = std::max<int64_t>(1, n_iters / 10);
  IterStats w;
  for (int64_t i = n_iters - window; i < n_iters; ++i) {
    w.episodes += history[i].episodes;
    w.successes += history[i].successes;
    w.return_sum += history[i].return_sum;
  }
  RunResult res;
  res.seed = seed;
  res.iterations = n_iters;
  res.frames = n_iters * fpi;
  res.final_score = w.episodes ? w.return_sum / w.episodes : 0.0;
  res.success_rate =
      w.episodes ? static_cast<double>(w.successes) / w.episodes : 0.0;
  res.metrics_csv = tag + ".metrics.csv";
  return res;
}

nlohmann::ordered_json summarize_runs(const ExperimentConfig& cfg,
                                      const CandidateSpec& cand,
                                      const std::vector<RunResult>& runs) {
  nlohmann::ordered_json j;
  j["schema"] = "hire-summary-v1";
  j["task"] = cfg.env.task_label();
  j["candidate"] = cand.label();
  j["short_label"] = cand.short_label();
  j["type_label"] = cand.type_label();
  j["tag"] = candidate_tag(cand);
  j["n_members"] = cand.n_members();
  j["beta0"] = cfg.beta0;
  j["kappa"] = cfg.kappa;
  j["phases"] = {{"pretrain_steps", cfg.phases.pretrain_steps},
                 {"finetune_steps", cfg.phases.finetune_steps}};
  j["total_steps"] = cfg.ppo.total_steps;
  j["final_score_definition"] =
      "mean episodic extrinsic return over episodes finishing in the last "
      "10% of iterations";
  nlohmann::ordered_json jruns = nlohmann::ordered_json::array();
  double score_sum = 0.0, succ_sum = 0.0;
  int ok = 0;
  for (const RunResult& r : runs) {
    nlohmann::ordered_json jr;
    jr["seed"] = r.seed;
    jr["iterations"] = r.iterations;
    jr["frames"] = r.frames;
    jr["final_score"] = r.final_score;
    jr["success_rate"] = r.success_rate;
    jr["metrics_csv"] = r.metrics_csv;
    jr["failed"] = r.failed;
    jr["error"] = r.error;
    jruns.push_back(jr);
    if (!r.failed) {
      score_sum += r.final_score;
      succ_sum += r.success_rate;
      ++ok;
    }
  }
  j["runs"] = jruns;
  j["aggregate"] = {
      {"completed", ok},
      {"final_score_mean", ok ? score_sum / ok : 0.0},
      {"success_rate_mean", ok ? succ_sum / ok : 0.0}};
  return j;
}

nlohmann::ordered_json run_experiment(const ExperimentConfig& cfg,
                                      const CandidateSpec& cand) {
  const std::string dir = run_dir(cfg, cand);
  std::filesystem::create_directories(dir);
  std::vector<RunResult> runs;
  for (uint64_t seed : cfg.seeds) {
    try {
      runs.push_back(run_single(cfg, cand, seed, dir));
    } catch (const std::exception& ex) {
      RunResult f;
      f.seed = seed;
      f.failed = true;
      f.error = ex.what();
      runs.push_back(f);
      std::fprintf(stderr, "[run %s seed %llu] failed: %s\n",
                   cand.label().c_str(),
                   static_cast<unsigned long long>(seed), ex.what());
    }
  }
  nlohmann::ordered_json j = summarize_runs(cfg, cand, runs);
  write_text_file(dir + "/summary.json", j.dump(2) + "\n");
  return j;
}

std::vector<FpsEntry> bench_fps(const ExperimentConfig& cfg,
                                const std::vector<std::string>& labels,
                                double seconds, int repeats) {
  if (!(seconds > 0.0)) throw std::invalid_argument("duration must be > 0");
  if (repeats < 1) throw std::invalid_argument("repeats must be >= 1");
  const int64_t fpi =
      int64_t{cfg.ppo.rollout_len} * int64_t{cfg.ppo.n_envs};
  const int warmup = 2;

  std::vector<FpsEntry> out;
  for (const std::string& label : labels) {
    CandidateSpec cand = parse_candidate(label);
    FpsEntry entry;
    entry.label = cand.label();
    entry.type_label = cand.type_label();
    entry.n_members = cand.n_members();
    for (int rep = 0; rep < repeats; ++rep) {
      TrainLoop loop(cfg, cand, 1 + static_cast<uint64_t>(rep));
      for (int i = 0; i < warmup; ++i) loop.iterate(Phase::Mixed);
      int64_t frames = 0;
      auto t0 = std::chrono::steady_clock::now();
      do {
        loop.iterate(Phase::Mixed);
        frames += fpi;
      } while (secs_since(t0) < seconds);
      entry.fps_runs.push_back(frames / secs_since(t0));
      entry.frames = frames;
    }
    std::vector<double> sorted = entry.fps_runs;
    std::sort(sorted.begin(), sorted.end());
    entry.median_fps = sorted[sorted.size() / 2];
    out.push_back(std::move(entry));
  }
  return out;
}

}  // namespace hire
