#include "fedpex/mab_pe.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fedpex/errors.hpp"

namespace fedpex {

std::uint64_t total(std::span<const std::uint64_t> counts) {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

double bonus_mab(std::uint64_t count, std::uint64_t count_sum, const MabBonusParams& params) {
  if (count == 0) throw ParameterError("bonus undefined for an arm with no samples");
  const double inflated = (1.0 + params.gamma_m) * static_cast<double>(count_sum);
  const double log_term =
      std::log(4.0 * static_cast<double>(params.arms) / params.delta * inflated * inflated);
  return params.sigma * std::sqrt(2.0 / static_cast<double>(count) * log_term);
}

Eigen::VectorXd bonuses_mab(std::span<const std::uint64_t> counts, const MabBonusParams& params) {
  const std::uint64_t sum = total(counts);
  Eigen::VectorXd out(static_cast<Eigen::Index>(counts.size()));
  for (std::size_t k = 0; k < counts.size(); ++k) {
    out(static_cast<Eigen::Index>(k)) = bonus_mab(counts[k], sum, params);
  }
  return out;
}

ArmPair select_pair_mab(const Eigen::VectorXd& mu_hat, const Eigen::VectorXd& bonuses) {
  if (mu_hat.size() < 2 || bonuses.size() != mu_hat.size()) {
    throw ParameterError("need matching estimate and bonus vectors with K >= 2");
  }
  ArmPair pair;
  pair.i = argmax(mu_hat);
  const auto i = static_cast<Eigen::Index>(pair.i);
  bool first = true;
  for (Eigen::Index k = 0; k < mu_hat.size(); ++k) {
    if (k == i) continue;
    const double score = mu_hat(k) - mu_hat(i) + bonuses(i) + bonuses(k);
    if (first || score > pair.index) {
      pair.j = static_cast<std::size_t>(k);
      pair.index = score;
      first = false;
    }
  }
  return pair;
}

std::size_t select_arm_mab(std::size_t i, std::size_t j, const Eigen::VectorXd& bonuses) {
  return bonuses(static_cast<Eigen::Index>(j)) > bonuses(static_cast<Eigen::Index>(i)) ? j : i;
}

ArmPair breaking_index(const Eigen::VectorXd& mu_hat, const Eigen::VectorXd& bonuses) {
  return select_pair_mab(mu_hat, bonuses);
}

std::size_t mab_target(const Eigen::VectorXd& mu_hat, std::span<const std::uint64_t> counts,
                       const MabBonusParams& params) {
  const Eigen::VectorXd alpha = bonuses_mab(counts, params);
  const ArmPair pair = select_pair_mab(mu_hat, alpha);
  return select_arm_mab(pair.i, pair.j, alpha);
}

bool check_trigger_mab(const MabAgentState& agent, const GrowthThreshold& gamma) {
  const auto base = static_cast<std::int64_t>(total(agent.counts));
  const auto local = static_cast<std::int64_t>(total(agent.local_counts));
  return gamma.exceeded(base + local, base);
}

void server_merge_mab(MabServerState& server, const Eigen::VectorXd& local_sums,
                      std::span<const std::uint64_t> local_counts) {
  for (std::size_t k = 0; k < local_counts.size(); ++k) {
    if (local_counts[k] == 0) continue;
    const auto e = static_cast<Eigen::Index>(k);
    const std::uint64_t merged = server.counts[k] + local_counts[k];
    server.mu_hat(e) =
        (server.mu_hat(e) * static_cast<double>(server.counts[k]) + local_sums(e)) /
        static_cast<double>(merged);
    server.counts[k] = merged;
  }
}

bool download_mab(MabAgentState& agent, const MabServerState& server,
                  const MabBonusParams& params) {
  agent.mu_hat = server.mu_hat;
  agent.counts = server.counts;
  agent.local_sums.setZero();
  std::fill(agent.local_counts.begin(), agent.local_counts.end(), 0);
  const std::size_t previous = agent.current_target;
  agent.current_target = mab_target(agent.mu_hat, agent.counts, params);
  return agent.current_target != previous;
}

MabFederation::MabFederation(const MabInstance& instance, const ResolvedConfig& config)
    : instance_(instance), gamma_(config.gamma) {
  instance_.validate();
  params_.arms = instance.arms();
  params_.delta = config.delta;
  params_.sigma = instance.sigma;
  params_.gamma_m = config.gamma.value() * static_cast<double>(config.agents);
  agents_.resize(config.agents);
}

void MabFederation::initialize(std::span<const double> first_rewards) {
  const std::size_t k = arms();
  if (first_rewards.size() != k) throw ParameterError("need one initial reward per arm");
  server_.mu_hat = Eigen::Map<const Eigen::VectorXd>(first_rewards.data(),
                                                     static_cast<Eigen::Index>(k));
  server_.counts.assign(k, 1);
  const std::size_t first_target = mab_target(server_.mu_hat, server_.counts, params_);
  for (auto& a : agents_) {
    a.mu_hat = server_.mu_hat;
    a.counts = server_.counts;
    a.local_sums = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
    a.local_counts.assign(k, 0);
    a.current_target = first_target;
  }
}

void MabFederation::initialize_empty() {
  const std::size_t k = arms();
  server_.mu_hat = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
  server_.counts.assign(k, 0);
  for (auto& a : agents_) {
    a.mu_hat = server_.mu_hat;
    a.counts = server_.counts;
    a.local_sums = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
    a.local_counts.assign(k, 0);
    a.current_target = 0;
  }
}

void MabFederation::record(std::size_t agent, std::size_t arm, double reward) {
  auto& a = agents_[agent];
  a.local_sums(static_cast<Eigen::Index>(arm)) += reward;
  a.local_counts[arm] += 1;
}

bool MabFederation::should_upload(std::size_t agent) const {
  return check_trigger_mab(agents_[agent], gamma_);
}

void MabFederation::upload(std::size_t agent) {
  auto& a = agents_[agent];
  server_merge_mab(server_, a.local_sums, a.local_counts);
  // Delivered data now lives on the server only.
  a.local_sums.setZero();
  std::fill(a.local_counts.begin(), a.local_counts.end(), 0);
}

bool MabFederation::server_ready() const {
  return std::all_of(server_.counts.begin(), server_.counts.end(),
                     [](std::uint64_t c) { return c > 0; });
}

ArmPair MabFederation::server_index() const {
  return breaking_index(server_.mu_hat, bonuses_mab(server_.counts, params_));
}

bool MabFederation::download(std::size_t agent, bool retarget) {
  auto& a = agents_[agent];
  if (retarget) return download_mab(a, server_, params_);
  a.mu_hat = server_.mu_hat;
  a.counts = server_.counts;
  a.local_sums.setZero();
  std::fill(a.local_counts.begin(), a.local_counts.end(), 0);
  return false;
}

void MabFederation::audit_conservation(std::span<const std::uint64_t> pulls) const {
  for (std::size_t k = 0; k < arms(); ++k) {
    std::uint64_t seen = server_.counts[k];
    for (const auto& a : agents_) seen += a.local_counts[k];
    if (seen != pulls[k]) {
      throw InvariantViolation("count conservation broken on arm " + std::to_string(k));
    }
  }
}

void MabFederation::audit_quiet_round(std::size_t agent) const {
  const auto& a = agents_[agent];
  if (check_trigger_mab(a, gamma_)) {
    throw InvariantViolation("agent " + std::to_string(agent) + " skipped a due upload");
  }
  const double local = static_cast<double>(total(a.local_counts));
  if (local > gamma_.value() * static_cast<double>(total(server_.counts)) * (1.0 + 1e-12)) {
    throw InvariantViolation("local buffer exceeds gamma times the server count");
  }
}

}  // namespace fedpex
