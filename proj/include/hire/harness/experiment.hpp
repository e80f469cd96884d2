#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "hire/fusion/candidates.hpp"
#include "hire/grid/gridworld.hpp"
#include "hire/ppo/ppo.hpp"

namespace hire {

// Two-phase schedule: a pretraining segment optimizing beta_t * I only
// (extrinsic forced to zero), then a finetuning segment optimizing E only
// (beta forced to zero). Both zero means a single mixed phase driven by the
// PPO total-step budget.
struct PhaseSchedule {
  int64_t pretrain_steps = 0;
  int64_t finetune_steps = 0;

  bool phased() const { return pretrain_steps > 0 || finetune_steps > 0; }
  void validate() const;
};

// Optional expansion of the full candidate grid for sweeps.
struct SweepGrid {
  bool enabled = false;
  std::vector<std::string> rewards{"ICM", "NGU", "RE3", "E3B"};
  std::vector<Strategy> strategies{Strategy::Summation, Strategy::Product,
                                   Strategy::Cycle, Strategy::Maximum};
  bool include_singles = true;
  bool include_extrinsic = true;
};

struct ExperimentConfig {
  GridSpec env;
  std::string candidate = "Extrinsic";
  std::vector<std::string> candidates;  // sweep cells; empty = {candidate}
  SweepGrid grid;                       // when enabled, overrides candidates
  double beta0 = 0.25;                  // gridworld default
  double kappa = 0.0;
  PpoConfig ppo;
  std::vector<uint64_t> seeds{1, 2, 3, 4, 5};
  PhaseSchedule phases;
  std::string out_dir = "runs";
  nlohmann::json modules = nlohmann::json::object();  // per-module overrides
  double module_update_proportion = 1.0;

  void validate() const;
  // Rejects unknown keys so config typos fail before any run starts.
  static ExperimentConfig from_json(const nlohmann::json& j);
  // Reads a JSON file; HIRE_OUT_DIR overrides out_dir when set.
  static ExperimentConfig load(const std::string& path);
  nlohmann::ordered_json to_json() const;
  // Candidate labels this config sweeps over, in deterministic order.
  std::vector<std::string> sweep_labels() const;
};

struct RunResult {
  uint64_t seed = 0;
  int64_t iterations = 0;
  int64_t frames = 0;
  double final_score = 0.0;   // mean episodic return over the last-10% window
  double success_rate = 0.0;  // fraction of successful episodes, same window
  std::string metrics_csv;    // filename relative to the run directory
  bool failed = false;
  std::string error;
};

// Filesystem-safe unique name for a candidate: "Ext", "ICM", "C_NR", ...
std::string file_label(const CandidateSpec& cand);
// Strategy tag for reports: Extrinsic, Baseline (single) or the strategy.
std::string candidate_tag(const CandidateSpec& cand);
std::string run_dir(const ExperimentConfig& cfg, const CandidateSpec& cand);

// One training run. Writes seed<k>.metrics.csv (deterministic bytes for a
// fixed config and seed), seed<k>.timing.csv (wall clock), and for phased
// schedules the seed<k>.boundary checkpoint, all under dir.
RunResult run_single(const ExperimentConfig& cfg, const CandidateSpec& cand,
                     uint64_t seed, const std::string& dir);

// Summary document over one candidate's per-seed results.
nlohmann::ordered_json summarize_runs(const ExperimentConfig& cfg,
                                      const CandidateSpec& cand,
                                      const std::vector<RunResult>& runs);

// All seeds of one candidate; writes and returns summary.json. A failing
// seed is recorded in the summary, never thrown.
nlohmann::ordered_json run_experiment(const ExperimentConfig& cfg,
                                      const CandidateSpec& cand);

// Every (candidate, seed) cell over a worker pool (HIRE_THREADS, default
// hardware concurrency). One failing cell never aborts the sweep.
void run_sweep(const ExperimentConfig& cfg);

struct FpsEntry {
  std::string label;
  std::string type_label;
  int n_members = 0;
  std::vector<double> fps_runs;  // one per repeat
  double median_fps = 0.0;
  int64_t frames = 0;  // of the last repeat
};

// Timed training loops per candidate; the first warmup iterations are
// excluded from the clock. Intended durations are >= 10 s per candidate,
// shorter ones are allowed for smoke tests.
std::vector<FpsEntry> bench_fps(const ExperimentConfig& cfg,
                                const std::vector<std::string>& labels,
                                double seconds, int repeats);

}  // namespace hire
