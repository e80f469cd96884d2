#pragma once

#include <string>
#include <vector>

#include "hire/fusion/fusion.hpp"

namespace hire {

// One entry of the candidate grid: the extrinsic-only baseline, a single
// intrinsic reward, or a fused hybrid.
struct CandidateSpec {
  bool extrinsic_only = false;
  FusionSpec fusion;  // ignored when extrinsic_only

  bool is_single() const { return !extrinsic_only && fusion.n() == 1; }
  int n_members() const { return extrinsic_only ? 0 : fusion.n(); }

  // "Extrinsic", "ICM", or e.g. "C(NGU, RE3)"
  std::string label() const;
  // Abbreviated member initials: "Ext", "I", "C(N, R)"
  std::string short_label() const;
  // Family tag: "HIRE-S0" (extrinsic), "HIRE-S1" (single), "HIRE-C2", ...
  std::string type_label() const;
};

// Accepts full and abbreviated forms: "Extrinsic"/"Ext", "ICM"/"I",
// "Cycle(NGU, RE3)"/"C(N,R)". Whitespace around tokens is ignored.
CandidateSpec parse_candidate(const std::string& text);

// The candidate grid in deterministic order: extrinsic baseline first (if
// included), then singles in input order, then hybrids grouped by strategy
// in input order, each strategy's subsets ordered by size then position.
std::vector<CandidateSpec> enumerate_candidates(
    const std::vector<std::string>& reward_names,
    const std::vector<Strategy>& strategies, bool include_singles,
    bool include_extrinsic);

}  // namespace hire
