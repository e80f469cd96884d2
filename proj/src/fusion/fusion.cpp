#include "hire/fusion/fusion.hpp"

#include <set>
#include <stdexcept>

namespace hire {

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::Summation: return "Summation";
    case Strategy::Product: return "Product";
    case Strategy::Cycle: return "Cycle";
    case Strategy::Maximum: return "Maximum";
  }
  return "?";
}

char strategy_letter(Strategy s) { return strategy_name(s)[0]; }

Strategy strategy_from_token(const std::string& tok) {
  if (tok == "Summation" || tok == "S") return Strategy::Summation;
  if (tok == "Product" || tok == "P") return Strategy::Product;
  if (tok == "Cycle" || tok == "C") return Strategy::Cycle;
  if (tok == "Maximum" || tok == "M") return Strategy::Maximum;
  throw std::invalid_argument("unknown fusion strategy: " + tok);
}

void FusionSpec::validate() const {
  if (members.empty())
    throw std::invalid_argument("fusion needs at least one member");
  std::set<std::string> uniq(members.begin(), members.end());
  if (uniq.size() != members.size())
    throw std::invalid_argument("fusion members must be duplicate-free");
  if (strategy == Strategy::Summation && !weights.empty() &&
      weights.size() != members.size())
    throw std::invalid_argument("summation weights length mismatch");
  if (!(beta0 > 0.0)) throw std::invalid_argument("beta0 must be positive");
  if (kappa < 0.0 || kappa >= 1.0)
    throw std::invalid_argument("kappa must lie in [0, 1)");
}

Eigen::MatrixXd fuse(
    const FusionSpec& spec, const std::vector<Eigen::MatrixXd>& bonuses,
    const Eigen::Matrix<int64_t, Eigen::Dynamic, Eigen::Dynamic>& steps) {
  spec.validate();
  const int n = spec.n();
  if (static_cast<int>(bonuses.size()) != n)
    throw std::invalid_argument("bonus count does not match member count");
  const auto rows = bonuses[0].rows(), cols = bonuses[0].cols();
  for (const auto& b : bonuses)
    if (b.rows() != rows || b.cols() != cols)
      throw std::invalid_argument("bonus matrices must share one shape");

  switch (spec.strategy) {
    case Strategy::Summation: {
      Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows, cols);
      for (int i = 0; i < n; ++i) {
        double w = spec.weights.empty() ? 1.0 : spec.weights[i];
        out += w * bonuses[i];
      }
      return out;
    }
    case Strategy::Product: {
      Eigen::MatrixXd out = bonuses[0];
      for (int i = 1; i < n; ++i)
        out = out.cwiseProduct(bonuses[i]);
      return out;
    }
    case Strategy::Maximum: {
      Eigen::MatrixXd out = bonuses[0];
      for (int i = 1; i < n; ++i) out = out.cwiseMax(bonuses[i]);
      return out;
    }
    case Strategy::Cycle: {
      if (steps.rows() != rows || steps.cols() != cols)
        throw std::invalid_argument("step counter shape mismatch");
      Eigen::MatrixXd out(rows, cols);
      for (Eigen::Index t = 0; t < rows; ++t)
        for (Eigen::Index e = 0; e < cols; ++e)
          out(t, e) = bonuses[steps(t, e) % n](t, e);
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

double beta_value(double beta0, double kappa, int64_t t) {
  if (t < 0) throw std::invalid_argument("beta: t must be >= 0");
  if (kappa == 0.0) return beta0;
  double decay = 1.0 - kappa;
  double b = beta0;
  for (int64_t i = 0; i < t; ++i) b *= decay;
  return b;
}

Eigen::MatrixXd combine(const Eigen::MatrixXd& extrinsic,
                        const Eigen::MatrixXd& fused,
                        const Eigen::ArrayXd& beta_per_row) {
  if (extrinsic.rows() != fused.rows() || extrinsic.cols() != fused.cols())
    throw std::invalid_argument("combine: shape mismatch");
  if (beta_per_row.size() != extrinsic.rows())
    throw std::invalid_argument("combine: one beta per row required");
  return extrinsic + (fused.array().colwise() * beta_per_row).matrix();
}

}  // namespace hire
