#include <cstdio>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "hire/analysis/analysis.hpp"
#include "hire/util/io.hpp"

namespace hire {

namespace {

constexpr uint64_t kBootstrapSeed = 12345;
constexpr int kResamples = 2000;
constexpr double kLevel = 0.95;

std::string fixed(double v, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

}  // namespace

void analyze_runs(const std::string& runs_dir, const std::string& out_dir,
                  const std::vector<int>& ks) {
  RunMatrix m = RunMatrix::from_dir(runs_dir);
  if (m.empty())
    throw std::runtime_error("no completed runs under " + runs_dir);
  std::filesystem::create_directories(out_dir);

  std::vector<RankEntry> ranking = rank_candidates(m);
  {
    CsvWriter csv(out_dir + "/ranking.csv",
                  {"rank", "candidate", "short_label", "tag", "n_members",
                   "mean", "stderr", "n_tasks"},
                  "hire analysis v1: per-task min-max normalized scores");
    int rank = 1;
    for (const RankEntry& e : ranking)
      csv.write_row({std::to_string(rank++), e.candidate, e.short_label,
                     e.tag, std::to_string(e.n_members), fmt_double(e.mean),
                     fmt_double(e.stderr_), std::to_string(e.n_tasks)});
  }

  RunMatrix norm = m.normalized();
  {
    CsvWriter csv(out_dir + "/iqm_ci.csv",
                  {"candidate", "short_label", "tag", "n_members", "n_runs",
                   "iqm", "ci_lo", "ci_hi"},
                  "hire analysis v1: pooled IQM of normalized scores, "
                  "stratified bootstrap 95% CI");
    for (const RankEntry& e : ranking) {
      int n_runs = 0;
      for (const auto& [task, xs] : norm.by_task(e.candidate))
        n_runs += static_cast<int>(xs.size());
      auto [lo, hi] = stratified_bootstrap_ci(norm, e.candidate, kResamples,
                                              kLevel, kBootstrapSeed);
      csv.write_row({e.candidate, e.short_label, e.tag,
                     std::to_string(e.n_members), std::to_string(n_runs),
                     fmt_double(pooled_iqm(norm, e.candidate)),
                     fmt_double(lo), fmt_double(hi)});
    }
  }

  {
    CsvWriter csv(out_dir + "/cdf.csv", {"n_members", "tau", "fraction"},
                  "hire analysis v1: fraction of runs with normalized score "
                  ">= tau");
    for (const CdfCurve& c : performance_cdf(m))
      for (size_t i = 0; i < c.tau.size(); ++i)
        csv.write_row({std::to_string(c.n_members), fmt_double(c.tau[i]),
                       fmt_double(c.fraction[i])});
  }

  std::vector<TopKShare> topk = top_k_proportions(m, ks);
  {
    CsvWriter csv(out_dir + "/topk.csv",
                  {"k", "effective_k", "tag", "share"},
                  "hire analysis v1: strategy share of per-task top-k "
                  "candidates");
    for (const TopKShare& s : topk)
      for (const auto& [tag, share] : s.share_by_tag)
        csv.write_row({std::to_string(s.k), std::to_string(s.effective_k),
                       tag, fmt_double(share)});
  }

  std::string rep;
  rep += "Run analysis\n============\n\n";
  rep += "Scores: mean episodic extrinsic return over the last 10% of\n";
  rep += "iterations per run, then min-max normalized per task before any\n";
  rep += "cross-task aggregation (the aggregation window and normalization\n";
  rep += "are local conventions; alternatives like best-iterate or AUC were\n";
  rep += "not used).\n\n";
  rep += "Tasks: ";
  for (const std::string& t : m.tasks()) rep += t + " ";
  rep += "\nSeeds: ";
  for (uint64_t s : m.seeds()) rep += std::to_string(s) + " ";
  rep += "\n\nRanking (mean +/- SE of per-task normalized scores)\n";
  rep += "---------------------------------------------------\n";
  int rank = 1;
  for (const RankEntry& e : ranking) {
    char line[160];
    std::snprintf(line, sizeof(line), "%3d. %-16s %-10s n=%d  %s +/- %s\n",
                  rank++, e.short_label.c_str(), e.tag.c_str(), e.n_members,
                  fixed(e.mean, 4).c_str(), fixed(e.stderr_, 4).c_str());
    rep += line;
  }
  rep += "\nTop-k strategy shares\n---------------------\n";
  for (const TopKShare& s : topk) {
    rep += "k=" + std::to_string(s.k);
    if (s.effective_k != s.k)
      rep += " (clamped to " + std::to_string(s.effective_k) + ")";
    rep += ":";
    for (const auto& [tag, share] : s.share_by_tag)
      if (share > 0.0) rep += "  " + tag + " " + fixed(share, 3);
    rep += "\n";
  }
  std::vector<std::string> missing = m.missing_cells();
  rep += "\nMissing cells: " + std::to_string(missing.size()) + "\n";
  for (const std::string& cell : missing) rep += "  " + cell + "\n";
  write_text_file(out_dir + "/report.txt", rep);
}

}  // namespace hire
