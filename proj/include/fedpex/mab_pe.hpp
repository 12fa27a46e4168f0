#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fedpex/config.hpp"
#include "fedpex/instance.hpp"
#include "fedpex/rng.hpp"

namespace fedpex {

using Counts = std::vector<std::uint64_t>;

std::uint64_t total(std::span<const std::uint64_t> counts);

/// Empirical best arm i, most ambiguous challenger j, and the index
/// mu(j) - mu(i) + bonus(i, j) of that pair.
struct ArmPair {
  std::size_t i = 0;
  std::size_t j = 1;
  double index = 0.0;
};

struct MabBonusParams {
  std::size_t arms = 2;
  double delta = 0.05;
  double sigma = 0.3;
  double gamma_m = 0.0;  ///< gamma * M
};

/// sigma * sqrt((2 / T_k) * log((4K / delta) * ((1 + gamma M) * T_sum)^2)).
double bonus_mab(std::uint64_t count, std::uint64_t count_sum, const MabBonusParams& params);
Eigen::VectorXd bonuses_mab(std::span<const std::uint64_t> counts, const MabBonusParams& params);

ArmPair select_pair_mab(const Eigen::VectorXd& mu_hat, const Eigen::VectorXd& bonuses);
/// Larger-bonus member of {i, j}; i on ties.
std::size_t select_arm_mab(std::size_t i, std::size_t j, const Eigen::VectorXd& bonuses);
ArmPair breaking_index(const Eigen::VectorXd& mu_hat, const Eigen::VectorXd& bonuses);

/// Arm an agent pulls while its statistics stay frozen.
std::size_t mab_target(const Eigen::VectorXd& mu_hat, std::span<const std::uint64_t> counts,
                       const MabBonusParams& params);

struct MabServerState {
  Eigen::VectorXd mu_hat;
  Counts counts;
};

struct MabAgentState {
  Eigen::VectorXd mu_hat;  ///< last downloaded server estimates
  Counts counts;           ///< last downloaded server counts
  Eigen::VectorXd local_sums;
  Counts local_counts;
  std::size_t current_target = 0;
};

bool check_trigger_mab(const MabAgentState& agent, const GrowthThreshold& gamma);

void server_merge_mab(MabServerState& server, const Eigen::VectorXd& local_sums,
                      std::span<const std::uint64_t> local_counts);

/// Copies the server statistics into the agent, clears its buffers and
/// recomputes the target. Returns true iff the target changed.
bool download_mab(MabAgentState& agent, const MabServerState& server,
                  const MabBonusParams& params);

/// Server plus M agents running the event-triggered protocol.
class MabFederation {
 public:
  MabFederation(const MabInstance& instance, const ResolvedConfig& config);

  std::size_t arms() const { return instance_.arms(); }
  std::size_t agents() const { return agents_.size(); }
  const MabInstance& instance() const { return instance_; }

  double sample(std::size_t arm, Rng& rng) const { return sample_reward(instance_, arm, rng); }

  /// Server and agents seeded with one reward per arm, counts 1.
  void initialize(std::span<const double> first_rewards);
  /// Server and agents start with no data (synchronous schedule).
  void initialize_empty();

  std::size_t target(std::size_t agent) const { return agents_[agent].current_target; }
  void record(std::size_t agent, std::size_t arm, double reward);
  bool should_upload(std::size_t agent) const;
  void upload(std::size_t agent);
  bool server_ready() const;
  ArmPair server_index() const;
  bool download(std::size_t agent, bool retarget = true);

  /// Throws InvariantViolation if server plus local counts differ from `pulls`.
  void audit_conservation(std::span<const std::uint64_t> pulls) const;
  /// Throws InvariantViolation if the agent's buffers exceed the trigger.
  void audit_quiet_round(std::size_t agent) const;

  const MabServerState& server() const { return server_; }
  const MabAgentState& agent(std::size_t m) const { return agents_[m]; }
  const MabBonusParams& agent_params() const { return params_; }

 private:
  const MabInstance& instance_;
  MabBonusParams params_;
  GrowthThreshold gamma_;
  MabServerState server_;
  std::vector<MabAgentState> agents_;
};

}  // namespace fedpex
