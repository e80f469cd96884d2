#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include "hire/harness/experiment.hpp"
#include "hire/util/io.hpp"

namespace hire {

namespace {

int worker_count(size_t n_cells) {
  int n = 0;
  if (const char* env = std::getenv("HIRE_THREADS"); env && *env)
    n = std::atoi(env);
  if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  if (n <= 0) n = 1;
  return std::min(n, static_cast<int>(n_cells ? n_cells : 1));
}

}  // namespace

void run_sweep(const ExperimentConfig& cfg) {
  std::vector<CandidateSpec> cands;
  for (const std::string& label : cfg.sweep_labels())
    cands.push_back(parse_candidate(label));

  struct Cell {
    size_t ci, si;
  };
  std::vector<Cell> cells;
  for (size_t ci = 0; ci < cands.size(); ++ci) {
    std::filesystem::create_directories(run_dir(cfg, cands[ci]));
    for (size_t si = 0; si < cfg.seeds.size(); ++si)
      cells.push_back({ci, si});
  }

  std::vector<std::vector<RunResult>> results(
      cands.size(), std::vector<RunResult>(cfg.seeds.size()));
  std::atomic<size_t> cursor{0};
  auto work = [&]() {
    for (;;) {
      size_t i = cursor.fetch_add(1);
      if (i >= cells.size()) return;
      const Cell& cell = cells[i];
      const CandidateSpec& cand = cands[cell.ci];
      uint64_t seed = cfg.seeds[cell.si];
      RunResult r;
      try {
        r = run_single(cfg, cand, seed, run_dir(cfg, cand));
        std::fprintf(stderr, "[sweep] %s seed %llu: score %.4f success %.3f\n",
                     cand.label().c_str(),
                     static_cast<unsigned long long>(seed), r.final_score,
                     r.success_rate);
      } catch (const std::exception& ex) {
        r.seed = seed;
        r.failed = true;
        r.error = ex.what();
        std::fprintf(stderr, "[sweep] %s seed %llu FAILED: %s\n",
                     cand.label().c_str(),
                     static_cast<unsigned long long>(seed), ex.what());
      }
      results[cell.ci][cell.si] = r;
    }
  };

  int n_workers = worker_count(cells.size());
  std::vector<std::thread> pool;
  for (int w = 0; w < n_workers; ++w) pool.emplace_back(work);
  for (std::thread& t : pool) t.join();

  for (size_t ci = 0; ci < cands.size(); ++ci) {
    nlohmann::ordered_json j = summarize_runs(cfg, cands[ci], results[ci]);
    write_text_file(run_dir(cfg, cands[ci]) + "/summary.json",
                    j.dump(2) + "\n");
  }
}

}  // namespace hire
