#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace hire {

struct RunRecord {
  std::string task;
  std::string candidate;    // full label, e.g. "C(NGU, RE3)"
  std::string short_label;  // abbreviated, e.g. "C(N, R)"
  std::string tag;          // Extrinsic | Baseline | Summation | Product |
                            // Cycle | Maximum
  int n_members = 0;
  uint64_t seed = 0;
  double score = 0.0;
};

// Scores keyed by (task, candidate, seed). Duplicate keys are rejected;
// absent cells stay absent and are reported, never imputed.
class RunMatrix {
 public:
  void add(const RunRecord& r);
  const std::vector<RunRecord>& records() const { return records_; }
  bool empty() const { return records_.empty(); }

  std::vector<std::string> tasks() const;       // sorted unique
  std::vector<std::string> candidates() const;  // sorted unique full labels
  std::vector<uint64_t> seeds() const;          // sorted unique
  // "task/candidate/seed" for every cross-product cell with no record
  std::vector<std::string> missing_cells() const;
  // scores of one candidate grouped by task, seed-sorted within each task;
  // throws if the candidate has no runs
  std::map<std::string, std::vector<double>> by_task(
      const std::string& candidate) const;
  // copy with scores min-max normalized per task across all that task's
  // records (constant task -> 0.5)
  RunMatrix normalized() const;

  // loads every summary.json under dir (recursive, path-sorted); failed
  // runs are skipped and so show up as missing cells
  static RunMatrix from_dir(const std::string& dir);

 private:
  std::vector<RunRecord> records_;
};

// Mean of the order statistics strictly inside the interquartile band:
// floor(N/4) values trimmed from each tail. Throws on empty input.
double iqm(std::vector<double> xs);

// IQM over the candidate's scores pooled across tasks, as stored.
double pooled_iqm(const RunMatrix& m, const std::string& candidate);

// Percentile interval of the pooled IQM: seeds resampled with replacement
// independently within each task stratum. Deterministic for a fixed seed.
std::pair<double, double> stratified_bootstrap_ci(const RunMatrix& m,
                                                  const std::string& candidate,
                                                  int n_resamples,
                                                  double level,
                                                  uint64_t seed);

struct CdfCurve {
  int n_members = 0;
  std::vector<double> tau;       // 101 points in [0, 1]
  std::vector<double> fraction;  // share of runs with normalized score >= tau
};

// Curves grouped by member count over per-task min-max normalized scores.
std::vector<CdfCurve> performance_cdf(const RunMatrix& m);

struct RankEntry {
  std::string candidate;
  std::string short_label;
  std::string tag;
  int n_members = 0;
  double mean = 0.0;    // mean of per-task mean normalized scores
  double stderr_ = 0.0; // standard error across tasks
  int n_tasks = 0;
};

// Descending by mean; ties broken lexicographically by full label.
std::vector<RankEntry> rank_candidates(const RunMatrix& m);

struct TopKShare {
  int k = 0;          // as requested (clamping is warned, not reflected here)
  int effective_k = 0;
  std::map<std::string, double> share_by_tag;  // all six tags, sums to 1
};

std::vector<TopKShare> top_k_proportions(const RunMatrix& m,
                                         const std::vector<int>& ks);

// Full pipeline: scan runs_dir, emit ranking.csv, iqm_ci.csv, cdf.csv,
// topk.csv and report.txt into out_dir. Deterministic output bytes.
void analyze_runs(const std::string& runs_dir, const std::string& out_dir,
                  const std::vector<int>& ks = {1, 3, 5});

}  // namespace hire
