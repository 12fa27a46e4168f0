#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fedpex/config.hpp"
#include "fedpex/instance.hpp"
#include "fedpex/linalg.hpp"
#include "fedpex/mab_pe.hpp"

namespace fedpex {

struct LinBonusParams {
  std::size_t dim = 1;
  double delta = 0.05;
  double sigma = 0.3;
  double lambda = 1.0;
  double gamma1 = 1.0;
  double gamma2 = 0.0;
  std::size_t agents = 1;
};

/// Ridge estimate V^{-1} b.
Eigen::VectorXd rls_estimate(const Eigen::MatrixXd& v, const Eigen::VectorXd& b);

/// Confidence radius
///   sqrt(lambda) + (sqrt(2 g1) M + sqrt(1 + g1 M))
///     * sigma * sqrt(d log((2/delta)(1 + (1 + g2 M) T_sum / (min(g1, 1) lambda)))).
double c_scalar(std::uint64_t count_sum, const LinBonusParams& params);

/// ||y||_{V^{-1}} * c.
double bonus_linear(const Eigen::MatrixXd& v, const Eigen::VectorXd& y, double c);
double bonus_linear(const linalg::SpdFactor<double>& v, const Eigen::VectorXd& y, double c);

ArmPair select_pair_linear(const Eigen::VectorXd& theta_hat, const Eigen::MatrixXd& contexts,
                           const Eigen::MatrixXd& v, double c);
ArmPair select_pair_linear(const Eigen::VectorXd& theta_hat, const Eigen::MatrixXd& contexts,
                           const linalg::SpdFactor<double>& v, double c);

/// Arm whose rank-one update of V minimises (kMin) or maximises (kMax)
/// y'(V + x_k x_k')^{-1} y; lowest index on ties.
std::size_t select_arm_greedy(const Eigen::MatrixXd& v, const Eigen::MatrixXd& contexts,
                              const Eigen::VectorXd& y, GreedySense sense = GreedySense::kMin);

struct LinServerState {
  Eigen::MatrixXd v;
  Eigen::VectorXd b;
  Counts counts;
};

struct LinAgentState {
  Eigen::MatrixXd v;
  Eigen::VectorXd b;
  Counts counts;
  Eigen::MatrixXd local_v;
  Eigen::VectorXd local_b;
  Counts local_counts;
  std::size_t current_target = 0;
  double logdet_v = 0.0;
  /// Support of the design behind current_target (LP selector only).
  std::vector<std::size_t> design_support;
  bool used_fallback = false;
};

bool check_trigger_hybrid(const LinAgentState& agent, double gamma1, const GrowthThreshold& gamma2);

void server_merge_linear(LinServerState& server, const Eigen::MatrixXd& local_v,
                         const Eigen::VectorXd& local_b, std::span<const std::uint64_t> local_counts);

/// Server breaking index. `c_override` replaces the confidence radius.
ArmPair stopping_linear(const LinServerState& server, const Eigen::MatrixXd& contexts,
                        const LinBonusParams& params, std::optional<double> c_override = {});

/// Frozen-statistics arm choice: pair from (V, b, counts), then the LP or
/// greedy rule. Writes target, support and fallback flag into `agent`.
void retarget_linear(LinAgentState& agent, const Eigen::MatrixXd& contexts,
                     const LinBonusParams& params, ArmSelect rule, GreedySense sense);

class LinFederation {
 public:
  LinFederation(const LinearInstance& instance, const ResolvedConfig& config);

  std::size_t arms() const { return instance_.arms(); }
  std::size_t agents() const { return agents_.size(); }
  const LinearInstance& instance() const { return instance_; }

  double sample(std::size_t arm, Rng& rng) const { return sample_reward(instance_, arm, rng); }

  void initialize(std::span<const double> first_rewards);
  void initialize_empty();

  std::size_t target(std::size_t agent) const { return agents_[agent].current_target; }
  void record(std::size_t agent, std::size_t arm, double reward);
  bool should_upload(std::size_t agent) const;
  void upload(std::size_t agent);
  bool server_ready() const;
  ArmPair server_index() const;
  bool download(std::size_t agent, bool retarget = true);

  void audit_conservation(std::span<const std::uint64_t> pulls) const;
  void audit_quiet_round(std::size_t agent) const;

  std::uint64_t lp_fallbacks() const { return lp_fallbacks_; }
  const LinServerState& server() const { return server_; }
  const LinAgentState& agent(std::size_t m) const { return agents_[m]; }
  const LinBonusParams& params() const { return params_; }

 private:
  void retarget(LinAgentState& agent);

  const LinearInstance& instance_;
  LinBonusParams params_;
  GrowthThreshold gamma2_;
  ArmSelect rule_;
  GreedySense sense_;
  LinServerState server_;
  std::vector<LinAgentState> agents_;
  // Every sample ever drawn: lambda I + sum x x' and sum r x.
  Eigen::MatrixXd all_v_;
  Eigen::VectorXd all_b_;
  std::uint64_t lp_fallbacks_ = 0;
};

}  // namespace fedpex
