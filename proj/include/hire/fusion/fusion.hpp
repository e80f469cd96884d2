#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace hire {

enum class Strategy { Summation, Product, Cycle, Maximum };

const char* strategy_name(Strategy s);
char strategy_letter(Strategy s);
Strategy strategy_from_token(const std::string& tok);

struct FusionSpec {
  Strategy strategy = Strategy::Summation;
  std::vector<std::string> members;  // canonical module names, duplicate-free
  std::vector<double> weights;       // Summation only; empty = all ones
  double beta0 = 0.25;
  double kappa = 0.0;

  void validate() const;
  int n() const { return static_cast<int>(members.size()); }
};

// Elementwise combination per strategy. steps(t,e) is the per-env cumulative
// environment-step counter; Cycle picks member (steps mod n).
Eigen::MatrixXd fuse(
    const FusionSpec& spec, const std::vector<Eigen::MatrixXd>& bonuses,
    const Eigen::Matrix<int64_t, Eigen::Dynamic, Eigen::Dynamic>& steps);

// beta0*(1-kappa)^t, computed by repeated multiplication so that the value
// at t+1 is exactly (1-kappa) times the value at t.
double beta_value(double beta0, double kappa, int64_t t);

// Incremental form of the same schedule for the training loop.
class BetaSchedule {
 public:
  BetaSchedule(double beta0, double kappa)
      : value_(beta0), decay_(1.0 - kappa) {}
  double value() const { return value_; }
  void advance() { value_ *= decay_; }

 private:
  double value_, decay_;
};

// R = E + beta_t * I, with one beta per row (time step).
Eigen::MatrixXd combine(const Eigen::MatrixXd& extrinsic,
                        const Eigen::MatrixXd& fused,
                        const Eigen::ArrayXd& beta_per_row);

}  // namespace hire
