#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hire/analysis/analysis.hpp"
#include "hire/grid/gridworld.hpp"
#include "hire/harness/experiment.hpp"

namespace {

using namespace hire;

// Member-count ladder used when a bench config names no candidate list.
std::vector<std::string> default_ladder() {
  return {"ICM", "S(ICM, NGU)", "S(ICM, NGU, RE3)", "S(ICM, NGU, RE3, E3B)"};
}

std::vector<std::string> split_csv_arg(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

int cmd_train(const std::string& config_path, int64_t seed_override,
              const std::string& candidate_override) {
  ExperimentConfig cfg = ExperimentConfig::load(config_path);
  if (seed_override >= 0)
    cfg.seeds = {static_cast<uint64_t>(seed_override)};
  std::string label =
      candidate_override.empty() ? cfg.candidate : candidate_override;
  CandidateSpec cand = parse_candidate(label);
  nlohmann::ordered_json summary = run_experiment(cfg, cand);
  for (const auto& r : summary.at("runs"))
    if (r.at("failed").get<bool>())
      std::printf("seed %s: FAILED (%s)\n",
                  r.at("seed").dump().c_str(),
                  r.at("error").get<std::string>().c_str());
    else
      std::printf("seed %s: score %.4f success %.3f\n",
                  r.at("seed").dump().c_str(),
                  r.at("final_score").get<double>(),
                  r.at("success_rate").get<double>());
  std::printf("summary: %s/summary.json\n", run_dir(cfg, cand).c_str());
  return 0;
}

int cmd_sweep(const std::string& config_path) {
  ExperimentConfig cfg = ExperimentConfig::load(config_path);
  run_sweep(cfg);
  std::printf("sweep done: %s\n", cfg.out_dir.c_str());
  return 0;
}

int cmd_bench(const std::string& config_path, double seconds, int repeats) {
  ExperimentConfig cfg = ExperimentConfig::load(config_path);
  std::vector<std::string> labels = cfg.sweep_labels();
  if (labels.size() == 1 && !cfg.grid.enabled && cfg.candidates.empty())
    labels = default_ladder();
  std::vector<FpsEntry> table = bench_fps(cfg, labels, seconds, repeats);
  std::printf("%-24s %-10s %8s  fps by repeat\n", "candidate", "type",
              "median");
  for (const FpsEntry& e : table) {
    std::printf("%-24s %-10s %8.1f ", e.label.c_str(), e.type_label.c_str(),
                e.median_fps);
    for (double f : e.fps_runs) std::printf(" %.1f", f);
    std::printf("\n");
  }
  return 0;
}

int cmd_enumerate(const std::string& rewards, const std::string& strategies,
                  bool no_singles, bool no_extrinsic) {
  std::vector<Strategy> strats;
  for (const std::string& tok : split_csv_arg(strategies))
    strats.push_back(strategy_from_token(tok));
  std::vector<CandidateSpec> grid =
      enumerate_candidates(split_csv_arg(rewards), strats, !no_singles,
                           !no_extrinsic);
  std::printf("%-4s %-28s %-16s %s\n", "#", "candidate", "short", "type");
  for (size_t i = 0; i < grid.size(); ++i)
    std::printf("%-4zu %-28s %-16s %s\n", i, grid[i].label().c_str(),
                grid[i].short_label().c_str(),
                grid[i].type_label().c_str());
  std::printf("total: %zu\n", grid.size());
  return 0;
}

int cmd_analyze(const std::string& runs, const std::string& out,
                const std::string& topk) {
  std::vector<int> ks;
  for (const std::string& tok : split_csv_arg(topk))
    ks.push_back(std::stoi(tok));
  if (ks.empty()) ks = {1, 3, 5};
  analyze_runs(runs, out, ks);
  std::printf("analysis written to %s\n", out.c_str());
  return 0;
}

int cmd_render(const std::string& config_path, uint64_t seed, int steps) {
  ExperimentConfig cfg = ExperimentConfig::load(config_path);
  GridWorld world(cfg.env, seed);
  Rng rng(seed);
  std::printf("%s\n", world.render_ascii().c_str());
  for (int i = 0; i < steps; ++i) {
    StepResult r =
        world.step(static_cast<int>(rng.uniform_int(0, kNumActions - 1)));
    std::printf("t=%d reward=%.3f done=%d truncated=%d\n%s\n", world.t(),
                r.reward, r.done, r.truncated, world.render_ascii().c_str());
    if (r.done || r.truncated) break;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hybrid intrinsic-reward training and analysis"};
  app.require_subcommand(1);

  std::string config_path, candidate, runs_dir, out_dir;
  std::string rewards = "ICM,NGU,RE3,E3B", strategies = "S,P,C,M";
  std::string topk = "1,3,5";
  int64_t seed = -1;
  uint64_t render_seed = 1;
  double seconds = 30.0;
  int repeats = 3, render_steps = 0;
  bool no_singles = false, no_extrinsic = false;

  CLI::App* train = app.add_subcommand("train", "run one candidate");
  train->add_option("--config", config_path, "JSON config file")->required();
  train->add_option("--seed", seed, "run only this seed");
  train->add_option("--candidate", candidate, "override the config candidate");

  CLI::App* sweep =
      app.add_subcommand("sweep", "run every (candidate, seed) cell");
  sweep->add_option("--config", config_path, "JSON config file")->required();

  CLI::App* bench = app.add_subcommand("bench-fps", "measure training FPS");
  bench->add_option("--config", config_path, "JSON config file")->required();
  bench->add_option("--seconds", seconds, "timed duration per repeat")
      ->check(CLI::Range(10.0, 36000.0));
  bench->add_option("--repeats", repeats, "repeats per candidate (median)")
      ->check(CLI::Range(1, 99));

  CLI::App* enumerate_cmd =
      app.add_subcommand("enumerate", "print the candidate grid");
  enumerate_cmd->add_option("--rewards", rewards, "comma-separated modules");
  enumerate_cmd->add_option("--strategies", strategies,
                            "comma-separated fusion strategies");
  enumerate_cmd->add_flag("--no-singles", no_singles);
  enumerate_cmd->add_flag("--no-extrinsic", no_extrinsic);

  CLI::App* analyze =
      app.add_subcommand("analyze", "aggregate sweep results");
  analyze->add_option("--runs", runs_dir, "directory of run outputs")
      ->required();
  analyze->add_option("--out", out_dir, "output directory")->required();
  analyze->add_option("--topk", topk, "comma-separated k values");

  CLI::App* render =
      app.add_subcommand("render", "print an ASCII layout sample");
  render->add_option("--config", config_path, "JSON config file")->required();
  render->add_option("--seed", render_seed, "layout seed");
  render->add_option("--steps", render_steps, "random steps to animate");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return cmd_train(config_path, seed, candidate);
    if (*sweep) return cmd_sweep(config_path);
    if (*bench) return cmd_bench(config_path, seconds, repeats);
    if (*enumerate_cmd)
      return cmd_enumerate(rewards, strategies, no_singles, no_extrinsic);
    if (*analyze) return cmd_analyze(runs_dir, out_dir, topk);
    if (*render) return cmd_render(config_path, render_seed, render_steps);
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 1;
  }
  return 0;
}
