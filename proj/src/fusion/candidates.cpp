#include "hire/fusion/candidates.hpp"

#include <stdexcept>

#include "hire/rewards/module.hpp"

namespace hire {
namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

char member_initial(const std::string& canonical) {
  return canonical[0];  // ICM->I, NGU->N, RE3->R, E3B->E
}

std::string join_members(const FusionSpec& f, bool abbreviated) {
  std::string out;
  for (size_t i = 0; i < f.members.size(); ++i) {
    if (i) out += ", ";
    if (abbreviated)
      out += member_initial(f.members[i]);
    else
      out += f.members[i];
  }
  return out;
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (true) {
    size_t comma = s.find(',', pos);
    out.push_back(trim(s.substr(pos, comma - pos)));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

std::string CandidateSpec::label() const {
  if (extrinsic_only) return "Extrinsic";
  if (is_single()) return fusion.members[0];
  std::string out(1, strategy_letter(fusion.strategy));
  out += "(" + join_members(fusion, false) + ")";
  return out;
}

std::string CandidateSpec::short_label() const {
  if (extrinsic_only) return "Ext";
  if (is_single()) return std::string(1, member_initial(fusion.members[0]));
  std::string out(1, strategy_letter(fusion.strategy));
  out += "(" + join_members(fusion, true) + ")";
  return out;
}

std::string CandidateSpec::type_label() const {
  if (extrinsic_only) return "HIRE-S0";
  if (is_single()) return "HIRE-S1";
  return std::string("HIRE-") + strategy_letter(fusion.strategy) +
         std::to_string(fusion.n());
}

CandidateSpec parse_candidate(const std::string& text) {
  std::string t = trim(text);
  if (t.empty()) throw std::invalid_argument("empty candidate");

  CandidateSpec c;
  if (t == "Extrinsic" || t == "Ext" || t == "extrinsic") {
    c.extrinsic_only = true;
    return c;
  }

  size_t open = t.find('(');
  if (open == std::string::npos) {
    c.fusion.strategy = Strategy::Summation;
    c.fusion.members = {canonical_module_name(t)};
    c.fusion.validate();
    return c;
  }

  if (t.back() != ')')
    throw std::invalid_argument("candidate missing closing paren: " + text);
  c.fusion.strategy = strategy_from_token(trim(t.substr(0, open)));
  for (const auto& tok : split_csv(t.substr(open + 1, t.size() - open - 2)))
    c.fusion.members.push_back(canonical_module_name(tok));
  c.fusion.validate();
  return c;
}

std::vector<CandidateSpec> enumerate_candidates(
    const std::vector<std::string>& reward_names,
    const std::vector<Strategy>& strategies, bool include_singles,
    bool include_extrinsic) {
  std::vector<std::string> names;
  for (const auto& n : reward_names)
    names.push_back(canonical_module_name(n));

  std::vector<CandidateSpec> out;
  if (include_extrinsic) {
    CandidateSpec c;
    c.extrinsic_only = true;
    out.push_back(c);
  }
  if (include_singles) {
    for (const auto& n : names) {
      CandidateSpec c;
      c.fusion.strategy = Strategy::Summation;
      c.fusion.members = {n};
      out.push_back(c);
    }
  }

  const int m = static_cast<int>(names.size());
  for (Strategy s : strategies) {
    for (int k = 2; k <= m; ++k) {
      // combinations of size k in lexicographic index order
      std::vector<int> idx(k);
      for (int i = 0; i < k; ++i) idx[i] = i;
      while (true) {
        CandidateSpec c;
        c.fusion.strategy = s;
        for (int i : idx) c.fusion.members.push_back(names[i]);
        out.push_back(c);

        int i = k - 1;
        while (i >= 0 && idx[i] == m - k + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      }
    }
  }
  return out;
}

}  // namespace hire
