#include "fedpex/linear_pe.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fedpex/errors.hpp"
#include "fedpex/l1lp.hpp"

namespace fedpex {

Eigen::VectorXd rls_estimate(const Eigen::MatrixXd& v, const Eigen::VectorXd& b) {
  return linalg::solve(v, b);
}

double c_scalar(std::uint64_t count_sum, const LinBonusParams& p) {
  const double m = static_cast<double>(p.agents);
  const double coeff = std::sqrt(2.0 * p.gamma1) * m + std::sqrt(1.0 + p.gamma1 * m);
  const double growth =
      1.0 + (1.0 + p.gamma2 * m) * static_cast<double>(count_sum) / (std::min(p.gamma1, 1.0) * p.lambda);
  const double radius =
      p.sigma * std::sqrt(static_cast<double>(p.dim) * std::log(2.0 / p.delta * growth));
  return std::sqrt(p.lambda) + coeff * radius;
}

double bonus_linear(const linalg::SpdFactor<double>& v, const Eigen::VectorXd& y, double c) {
  return std::sqrt(v.quad_form_inv(y)) * c;
}

double bonus_linear(const Eigen::MatrixXd& v, const Eigen::VectorXd& y, double c) {
  return bonus_linear(linalg::SpdFactor<double>(v), y, c);
}

ArmPair select_pair_linear(const Eigen::VectorXd& theta_hat, const Eigen::MatrixXd& contexts,
                           const linalg::SpdFactor<double>& v, double c) {
  if (contexts.cols() < 2) throw ParameterError("need K >= 2");
  const Eigen::VectorXd rewards = contexts.transpose() * theta_hat;
  ArmPair pair;
  pair.i = argmax(rewards);
  const auto i = static_cast<Eigen::Index>(pair.i);
  bool first = true;
  for (Eigen::Index k = 0; k < contexts.cols(); ++k) {
    if (k == i) continue;
    const Eigen::VectorXd y = contexts.col(i) - contexts.col(k);
    const double score = rewards(k) - rewards(i) + bonus_linear(v, y, c);
    if (first || score > pair.index) {
      pair.j = static_cast<std::size_t>(k);
      pair.index = score;
      first = false;
    }
  }
  return pair;
}

ArmPair select_pair_linear(const Eigen::VectorXd& theta_hat, const Eigen::MatrixXd& contexts,
                           const Eigen::MatrixXd& v, double c) {
  return select_pair_linear(theta_hat, contexts, linalg::SpdFactor<double>(v), c);
}

std::size_t select_arm_greedy(const Eigen::MatrixXd& v, const Eigen::MatrixXd& contexts,
                              const Eigen::VectorXd& y, GreedySense sense) {
  std::size_t best = 0;
  double best_value = 0.0;
  for (Eigen::Index k = 0; k < contexts.cols(); ++k) {
    const Eigen::MatrixXd updated = v + contexts.col(k) * contexts.col(k).transpose();
    const double value = linalg::quad_form_inv(updated, y);
    const bool better = sense == GreedySense::kMin ? value < best_value : value > best_value;
    if (k == 0 || better) {
      best = static_cast<std::size_t>(k);
      best_value = value;
    }
  }
  return best;
}

bool check_trigger_hybrid(const LinAgentState& agent, double gamma1, const GrowthThreshold& gamma2) {
  const double grown = linalg::logdet(agent.v + agent.local_v);
  if (grown > std::log1p(gamma1) + linalg::logdet(agent.v)) return true;
  const auto base = static_cast<std::int64_t>(total(agent.counts));
  const auto local = static_cast<std::int64_t>(total(agent.local_counts));
  return gamma2.exceeded(base + local, base);
}

void server_merge_linear(LinServerState& server, const Eigen::MatrixXd& local_v,
                         const Eigen::VectorXd& local_b, std::span<const std::uint64_t> local_counts) {
  server.v += local_v;
  server.b += local_b;
  for (std::size_t k = 0; k < local_counts.size(); ++k) server.counts[k] += local_counts[k];
}

ArmPair stopping_linear(const LinServerState& server, const Eigen::MatrixXd& contexts,
                        const LinBonusParams& params, std::optional<double> c_override) {
  const linalg::SpdFactor<double> factor(server.v);
  const Eigen::VectorXd theta_hat = factor.solve(server.b);
  const double c = c_override ? *c_override : c_scalar(total(server.counts), params);
  return select_pair_linear(theta_hat, contexts, factor, c);
}

void retarget_linear(LinAgentState& agent, const Eigen::MatrixXd& contexts,
                     const LinBonusParams& params, ArmSelect rule, GreedySense sense) {
  const linalg::SpdFactor<double> factor(agent.v);
  agent.logdet_v = factor.logdet();
  const Eigen::VectorXd theta_hat = factor.solve(agent.b);
  const double c = c_scalar(total(agent.counts), params);
  const ArmPair pair = select_pair_linear(theta_hat, contexts, factor, c);
  const Eigen::VectorXd y = contexts.col(static_cast<Eigen::Index>(pair.i)) -
                            contexts.col(static_cast<Eigen::Index>(pair.j));

  agent.design_support.clear();
  agent.used_fallback = false;
  if (rule == ArmSelect::kLp) {
    try {
      const L1Solution design = solve_l1(contexts, y);
      agent.current_target = informative_arm_lp(agent.counts, design.p);
      for (Eigen::Index k = 0; k < design.p.size(); ++k) {
        if (design.p(k) > kSupportTol) agent.design_support.push_back(static_cast<std::size_t>(k));
      }
      return;
    } catch (const InfeasibleProgram&) {
      agent.used_fallback = true;
    } catch (const ZeroTarget&) {
      agent.used_fallback = true;
    }
  }
  agent.current_target = select_arm_greedy(agent.v, contexts, y, sense);
}

LinFederation::LinFederation(const LinearInstance& instance, const ResolvedConfig& config)
    : instance_(instance),
      gamma2_(config.gamma2),
      rule_(config.arm_select),
      sense_(config.greedy_sense) {
  instance_.validate();
  params_.dim = instance.dim();
  params_.delta = config.delta;
  params_.sigma = instance.sigma;
  params_.lambda = config.lambda;
  params_.gamma1 = config.gamma1;
  params_.gamma2 = config.gamma2.value();
  params_.agents = config.agents;
  agents_.resize(config.agents);
}

void LinFederation::retarget(LinAgentState& agent) {
  retarget_linear(agent, instance_.contexts, params_, rule_, sense_);
  if (agent.used_fallback) ++lp_fallbacks_;
}

void LinFederation::initialize(std::span<const double> first_rewards) {
  const auto d = static_cast<Eigen::Index>(instance_.dim());
  const std::size_t k = arms();
  if (first_rewards.size() != k) throw ParameterError("need one initial reward per arm");
  const auto& x = instance_.contexts;
  server_.v = params_.lambda * Eigen::MatrixXd::Identity(d, d) + x * x.transpose();
  server_.b = x * Eigen::Map<const Eigen::VectorXd>(first_rewards.data(),
                                                    static_cast<Eigen::Index>(k));
  server_.counts.assign(k, 1);
  all_v_ = server_.v;
  all_b_ = server_.b;

  LinAgentState seed;
  seed.v = server_.v;
  seed.b = server_.b;
  seed.counts = server_.counts;
  seed.local_v = Eigen::MatrixXd::Zero(d, d);
  seed.local_b = Eigen::VectorXd::Zero(d);
  seed.local_counts.assign(k, 0);
  retarget(seed);
  lp_fallbacks_ = seed.used_fallback ? 1 : 0;
  std::fill(agents_.begin(), agents_.end(), seed);
}

void LinFederation::initialize_empty() {
  const auto d = static_cast<Eigen::Index>(instance_.dim());
  const std::size_t k = arms();
  server_.v = params_.lambda * Eigen::MatrixXd::Identity(d, d);
  server_.b = Eigen::VectorXd::Zero(d);
  server_.counts.assign(k, 0);
  all_v_ = server_.v;
  all_b_ = server_.b;
  for (auto& a : agents_) {
    a.v = server_.v;
    a.b = server_.b;
    a.counts = server_.counts;
    a.local_v = Eigen::MatrixXd::Zero(d, d);
    a.local_b = Eigen::VectorXd::Zero(d);
    a.local_counts.assign(k, 0);
    a.current_target = 0;
    a.logdet_v = linalg::logdet(a.v);
    a.design_support.clear();
  }
}

void LinFederation::record(std::size_t agent, std::size_t arm, double reward) {
  auto& a = agents_[agent];
  const auto x = instance_.contexts.col(static_cast<Eigen::Index>(arm));
  a.local_v.noalias() += x * x.transpose();
  a.local_b += reward * x;
  a.local_counts[arm] += 1;
  all_v_.noalias() += x * x.transpose();
  all_b_ += reward * x;
}

bool LinFederation::should_upload(std::size_t agent) const {
  const auto& a = agents_[agent];
  const double grown = linalg::logdet(a.v + a.local_v);
  if (grown > std::log1p(params_.gamma1) + a.logdet_v) return true;
  const auto base = static_cast<std::int64_t>(total(a.counts));
  const auto local = static_cast<std::int64_t>(total(a.local_counts));
  return gamma2_.exceeded(base + local, base);
}

void LinFederation::upload(std::size_t agent) {
  auto& a = agents_[agent];
  server_merge_linear(server_, a.local_v, a.local_b, a.local_counts);
  a.local_v.setZero();
  a.local_b.setZero();
  std::fill(a.local_counts.begin(), a.local_counts.end(), 0);
}

bool LinFederation::server_ready() const {
  return std::all_of(server_.counts.begin(), server_.counts.end(),
                     [](std::uint64_t c) { return c > 0; });
}

ArmPair LinFederation::server_index() const {
  return stopping_linear(server_, instance_.contexts, params_);
}

bool LinFederation::download(std::size_t agent, bool retarget_now) {
  auto& a = agents_[agent];
  a.v = server_.v;
  a.b = server_.b;
  a.counts = server_.counts;
  a.local_v.setZero();
  a.local_b.setZero();
  std::fill(a.local_counts.begin(), a.local_counts.end(), 0);
  if (!retarget_now) {
    a.logdet_v = linalg::logdet(a.v);
    return false;
  }
  const std::size_t previous = a.current_target;
  retarget(a);
  return a.current_target != previous;
}

void LinFederation::audit_conservation(std::span<const std::uint64_t> pulls) const {
  Eigen::MatrixXd v = server_.v;
  Eigen::VectorXd b = server_.b;
  for (std::size_t k = 0; k < arms(); ++k) {
    std::uint64_t seen = server_.counts[k];
    for (const auto& a : agents_) seen += a.local_counts[k];
    if (seen != pulls[k]) {
      throw InvariantViolation("count conservation broken on arm " + std::to_string(k));
    }
  }
  for (const auto& a : agents_) {
    v += a.local_v;
    b += a.local_b;
  }
  const double v_tol = 1e-9 * (1.0 + all_v_.cwiseAbs().maxCoeff());
  const double b_tol = 1e-9 * (1.0 + all_b_.cwiseAbs().maxCoeff());
  if ((v - all_v_).cwiseAbs().maxCoeff() > v_tol) {
    throw InvariantViolation("covariance conservation broken");
  }
  if ((b - all_b_).cwiseAbs().maxCoeff() > b_tol) {
    throw InvariantViolation("reward-vector conservation broken");
  }
}

void LinFederation::audit_quiet_round(std::size_t agent) const {
  const auto& a = agents_[agent];
  const double growth = linalg::logdet(a.v + a.local_v) - linalg::logdet(a.v);
  if (growth > std::log1p(params_.gamma1) + 1e-10) {
    throw InvariantViolation("agent " + std::to_string(agent) + " exceeded the determinant trigger");
  }
  const auto base = static_cast<std::int64_t>(total(a.counts));
  const auto local = static_cast<std::int64_t>(total(a.local_counts));
  if (gamma2_.exceeded(base + local, base)) {
    throw InvariantViolation("agent " + std::to_string(agent) + " exceeded the count trigger");
  }
}

}  // namespace fedpex
