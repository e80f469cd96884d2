#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

#include "json.hpp"

#include "hire/analysis/analysis.hpp"
#include "hire/util/rng.hpp"

namespace hire {

void RunMatrix::add(const RunRecord& r) {
  for (const RunRecord& have : records_)
    if (have.task == r.task && have.candidate == r.candidate &&
        have.seed == r.seed)
      throw std::invalid_argument("duplicate run cell: " + r.task + "/" +
                                  r.candidate + "/seed" +
                                  std::to_string(r.seed));
  records_.push_back(r);
}

std::vector<std::string> RunMatrix::tasks() const {
  std::set<std::string> s;
  for (const RunRecord& r : records_) s.insert(r.task);
  return {s.begin(), s.end()};
}

std::vector<std::string> RunMatrix::candidates() const {
  std::set<std::string> s;
  for (const RunRecord& r : records_) s.insert(r.candidate);
  return {s.begin(), s.end()};
}

std::vector<uint64_t> RunMatrix::seeds() const {
  std::set<uint64_t> s;
  for (const RunRecord& r : records_) s.insert(r.seed);
  return {s.begin(), s.end()};
}

std::vector<std::string> RunMatrix::missing_cells() const {
  std::set<std::string> present;
  for (const RunRecord& r : records_)
    present.insert(r.task + "/" + r.candidate + "/seed" +
                   std::to_string(r.seed));
  std::vector<std::string> out;
  for (const std::string& t : tasks())
    for (const std::string& c : candidates())
      for (uint64_t s : seeds()) {
        std::string key = t + "/" + c + "/seed" + std::to_string(s);
        if (!present.count(key)) out.push_back(key);
      }
  return out;
}

std::map<std::string, std::vector<double>> RunMatrix::by_task(
    const std::string& candidate) const {
  std::map<std::string, std::vector<std::pair<uint64_t, double>>> acc;
  for (const RunRecord& r : records_)
    if (r.candidate == candidate) acc[r.task].push_back({r.seed, r.score});
  if (acc.empty())
    throw std::invalid_argument("candidate has no runs: " + candidate);
  std::map<std::string, std::vector<double>> out;
  for (auto& [task, rows] : acc) {
    std::sort(rows.begin(), rows.end());
    for (auto& [seed, score] : rows) out[task].push_back(score);
  }
  return out;
}

RunMatrix RunMatrix::normalized() const {
  std::map<std::string, std::pair<double, double>> range;  // task -> lo,hi
  for (const RunRecord& r : records_) {
    auto it = range.find(r.task);
    if (it == range.end()) {
      range[r.task] = {r.score, r.score};
    } else {
      it->second.first = std::min(it->second.first, r.score);
      it->second.second = std::max(it->second.second, r.score);
    }
  }
  RunMatrix out;
  for (RunRecord r : records_) {
    auto [lo, hi] = range.at(r.task);
    r.score = hi > lo ? (r.score - lo) / (hi - lo) : 0.5;
    out.records_.push_back(std::move(r));
  }
  return out;
}

RunMatrix RunMatrix::from_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::exists(dir))
    throw std::runtime_error("runs directory does not exist: " + dir);
  std::vector<std::string> paths;
  for (const auto& entry : fs::recursive_directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().filename() == "summary.json")
      paths.push_back(entry.path().string());
  std::sort(paths.begin(), paths.end());

  RunMatrix m;
  for (const std::string& path : paths) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    RunRecord base;
    base.task = j.at("task");
    base.candidate = j.at("candidate");
    base.short_label = j.at("short_label");
    base.tag = j.at("tag");
    base.n_members = j.at("n_members");
    for (const auto& jr : j.at("runs")) {
      if (jr.at("failed").get<bool>()) continue;
      RunRecord r = base;
      r.seed = jr.at("seed");
      r.score = jr.at("final_score");
      m.add(r);
    }
  }
  return m;
}

double iqm(std::vector<double> xs) {
  if (xs.empty()) throw std::invalid_argument("iqm of empty list");
  std::sort(xs.begin(), xs.end());
  size_t trim = xs.size() / 4;
  double sum = 0.0;
  for (size_t i = trim; i < xs.size() - trim; ++i) sum += xs[i];
  return sum / static_cast<double>(xs.size() - 2 * trim);
}

double pooled_iqm(const RunMatrix& m, const std::string& candidate) {
  std::vector<double> pooled;
  for (const auto& [task, scores] : m.by_task(candidate))
    pooled.insert(pooled.end(), scores.begin(), scores.end());
  return iqm(std::move(pooled));
}

std::pair<double, double> stratified_bootstrap_ci(const RunMatrix& m,
                                                  const std::string& candidate,
                                                  int n_resamples,
                                                  double level,
                                                  uint64_t seed) {
  if (n_resamples < 1000)
    throw std::invalid_argument("n_resamples must be >= 1000");
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument("level must be in (0, 1)");
  auto groups = m.by_task(candidate);

  Rng rng(seed);
  std::vector<double> agg(static_cast<size_t>(n_resamples));
  std::vector<double> pooled;
  for (double& a : agg) {
    pooled.clear();
    for (const auto& [task, scores] : groups) {
      int64_t n = static_cast<int64_t>(scores.size());
      for (int64_t i = 0; i < n; ++i)
        pooled.push_back(scores[rng.uniform_int(0, n - 1)]);
    }
    a = iqm(pooled);
  }
  std::sort(agg.begin(), agg.end());
  auto quantile = [&](double q) {
    double pos = q * static_cast<double>(agg.size() - 1);
    size_t i = static_cast<size_t>(pos);
    double frac = pos - static_cast<double>(i);
    size_t j = std::min(i + 1, agg.size() - 1);
    return agg[i] * (1.0 - frac) + agg[j] * frac;
  };
  double alpha = (1.0 - level) / 2.0;
  return {quantile(alpha), quantile(1.0 - alpha)};
}

std::vector<CdfCurve> performance_cdf(const RunMatrix& m) {
  if (m.empty()) throw std::invalid_argument("performance_cdf of empty matrix");
  RunMatrix norm = m.normalized();
  std::map<int, std::vector<double>> groups;
  for (const RunRecord& r : norm.records()) groups[r.n_members].push_back(r.score);

  std::vector<CdfCurve> out;
  for (const auto& [n_members, scores] : groups) {
    CdfCurve c;
    c.n_members = n_members;
    for (int i = 0; i <= 100; ++i) {
      double tau = static_cast<double>(i) / 100.0;
      int64_t count = 0;
      for (double s : scores)
        if (s >= tau) ++count;
      c.tau.push_back(tau);
      c.fraction.push_back(static_cast<double>(count) /
                           static_cast<double>(scores.size()));
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<RankEntry> rank_candidates(const RunMatrix& m) {
  RunMatrix norm = m.normalized();
  std::map<std::string, RankEntry> meta;
  std::map<std::string, std::map<std::string, std::vector<double>>> scores;
  for (const RunRecord& r : norm.records()) {
    auto& e = meta[r.candidate];
    e.candidate = r.candidate;
    e.short_label = r.short_label;
    e.tag = r.tag;
    e.n_members = r.n_members;
    scores[r.candidate][r.task].push_back(r.score);
  }

  std::vector<RankEntry> out;
  for (auto& [cand, by_task] : scores) {
    RankEntry e = meta[cand];
    std::vector<double> task_means;
    for (const auto& [task, xs] : by_task) {
      double s = 0.0;
      for (double x : xs) s += x;
      task_means.push_back(s / static_cast<double>(xs.size()));
    }
    double n = static_cast<double>(task_means.size());
    double mean = 0.0;
    for (double t : task_means) mean += t;
    mean /= n;
    double var = 0.0;
    if (task_means.size() > 1) {
      for (double t : task_means) var += (t - mean) * (t - mean);
      var /= (n - 1.0);
    }
    e.mean = mean;
    e.stderr_ = std::sqrt(var / n);
    e.n_tasks = static_cast<int>(task_means.size());
    out.push_back(std::move(e));
  }
  std::sort(out.begin(), out.end(), [](const RankEntry& a, const RankEntry& b) {
    if (a.mean != b.mean) return a.mean > b.mean;
    return a.candidate < b.candidate;
  });
  return out;
}

std::vector<TopKShare> top_k_proportions(const RunMatrix& m,
                                         const std::vector<int>& ks) {
  static const char* kTags[] = {"Summation", "Product",  "Cycle",
                                "Maximum",   "Baseline", "Extrinsic"};
  RunMatrix norm = m.normalized();
  // per task: candidates ordered by mean normalized score
  std::map<std::string, std::map<std::string, std::vector<double>>> by_task;
  std::map<std::string, std::string> tag_of;
  for (const RunRecord& r : norm.records()) {
    by_task[r.task][r.candidate].push_back(r.score);
    tag_of[r.candidate] = r.tag;
  }
  std::map<std::string, std::vector<std::string>> order;  // task -> ranked
  size_t n_candidates = 0;
  for (const auto& [task, cands] : by_task) {
    std::vector<std::pair<double, std::string>> rows;
    for (const auto& [cand, xs] : cands) {
      double s = 0.0;
      for (double x : xs) s += x;
      rows.push_back({s / static_cast<double>(xs.size()), cand});
    }
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    for (const auto& [score, cand] : rows) order[task].push_back(cand);
    n_candidates = std::max(n_candidates, rows.size());
  }

  std::vector<TopKShare> out;
  for (int k : ks) {
    if (k < 1) throw std::invalid_argument("top-k needs k >= 1");
    int eff = k;
    if (static_cast<size_t>(k) > n_candidates) {
      eff = static_cast<int>(n_candidates);
      std::fprintf(stderr,
                   "[analysis] top-%d clamped to %d (candidate count)\n", k,
                   eff);
    }
    std::map<std::string, int64_t> counts;
    int64_t total = 0;
    for (const auto& [task, ranked] : order)
      for (int i = 0; i < eff && i < static_cast<int>(ranked.size()); ++i) {
        ++counts[tag_of[ranked[i]]];
        ++total;
      }
    TopKShare share;
    share.k = k;
    share.effective_k = eff;
    for (const char* tag : kTags)
      share.share_by_tag[tag] =
          total ? static_cast<double>(counts[tag]) / static_cast<double>(total)
                : 0.0;
    out.push_back(std::move(share));
  }
  return out;
}

}  // namespace hire
