#include "fedpex/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fedpex/l1lp.hpp"
#include "fedpex/runner.hpp"

namespace fedpex {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class Instance>
std::vector<double> all_gaps(const Instance& inst) {
  std::vector<double> out(inst.arms());
  for (std::size_t k = 0; k < inst.arms(); ++k) out[k] = inst.gap(k);
  return out;
}

}  // namespace

TheoryReport compute_theory_diagnostics(const MabInstance& instance, const RunConfig& config,
                                        std::uint64_t tau) {
  instance.validate();
  const ResolvedConfig cfg = resolve(config, instance.arms(), instance.sigma);
  TheoryReport rep;
  rep.best_arm = instance.best_arm();
  rep.gaps = all_gaps(instance);
  rep.tau = tau;
  const double eps = cfg.epsilon;
  const double var = instance.sigma * instance.sigma;
  for (double gap : rep.gaps) {
    const double denom = std::max((gap + eps) / 3.0, eps);
    if (denom == 0.0) {
      rep.infinite = true;
      continue;
    }
    rep.complexity += var / (denom * denom);
  }
  if (rep.infinite) rep.complexity = kInf;
  rep.comm_bound = mab_comm_bound(cfg.agents, cfg.gamma.value(), tau);
  return rep;
}

TheoryReport compute_theory_diagnostics(const LinearInstance& instance, const RunConfig& config,
                                        std::uint64_t tau) {
  instance.validate();
  const ResolvedConfig cfg = resolve(config, instance.arms(), instance.sigma);
  TheoryReport rep;
  rep.best_arm = instance.best_arm();
  rep.gaps = all_gaps(instance);
  rep.tau = tau;
  const double eps = cfg.epsilon;
  const std::size_t arms = instance.arms();

  std::vector<double> worst(arms, 0.0);
  for (std::size_t i = 0; i < arms; ++i) {
    for (std::size_t j = 0; j < arms; ++j) {
      if (i == j) continue;  // y(i, i) = 0 contributes nothing
      const Eigen::VectorXd y = instance.contexts.col(static_cast<Eigen::Index>(i)) -
                                instance.contexts.col(static_cast<Eigen::Index>(j));
      if (y.isZero(0.0)) continue;
      const L1Solution design = solve_l1(instance.contexts, y);
      const double denom =
          std::max({(rep.gaps[i] + eps) / 3.0, (rep.gaps[j] + eps) / 3.0, eps});
      for (std::size_t k = 0; k < arms; ++k) {
        const double weight = design.rho * design.p(static_cast<Eigen::Index>(k));
        if (weight == 0.0) continue;
        if (denom == 0.0) {
          rep.infinite = true;
          continue;
        }
        worst[k] = std::max(worst[k], weight / (denom * denom));
      }
    }
  }
  for (double w : worst) rep.complexity += w;
  if (rep.infinite) rep.complexity = kInf;
  rep.comm_bound = linear_comm_bound(cfg.agents, cfg.gamma1, cfg.gamma2.value(), instance.dim(),
                                     cfg.lambda, tau);
  return rep;
}

}  // namespace fedpex
