#include "fedpex/runner.hpp"

#include <cmath>
#include <sstream>

#include "driver.hpp"
#include "fedpex/errors.hpp"
#include "fedpex/linear_pe.hpp"
#include "fedpex/mab_pe.hpp"

namespace fedpex {

double mab_comm_bound(std::size_t agents, double gamma, std::uint64_t tau) {
  return 2.0 * (static_cast<double>(agents) + 1.0 / gamma) * std::log2(static_cast<double>(tau));
}

double linear_comm_bound(std::size_t agents, double gamma1, double gamma2, std::size_t dim,
                         double lambda, std::uint64_t tau) {
  const double m = static_cast<double>(agents);
  const double d = static_cast<double>(dim);
  const double t = static_cast<double>(tau);
  return 2.0 * ((m + 1.0 / gamma1) * d * std::log2(1.0 + t / (lambda * d)) +
                (m + 1.0 / gamma2) * std::log2(t));
}

namespace {

[[noreturn]] void bound_violation(const RunResult& res, double bound) {
  std::ostringstream msg;
  msg << "communication cost " << res.comm_cost << " exceeds bound " << bound << " at tau "
      << res.tau;
  throw InvariantViolation(msg.str());
}

}  // namespace

RunResult run_famabpe(const MabInstance& instance, const RunConfig& config, AuditLog* log) {
  const ResolvedConfig cfg = resolve(config, instance.arms(), instance.sigma);
  MabFederation fed(instance, cfg);
  RunResult res = detail::run_event_triggered(fed, cfg, false, log);
  if (res.terminated) {
    const double bound = mab_comm_bound(cfg.agents, cfg.gamma.value(), res.tau);
    if (static_cast<double>(res.comm_cost) > bound) bound_violation(res, bound);
  }
  return res;
}

RunResult run_falinpe(const LinearInstance& instance, const RunConfig& config, AuditLog* log) {
  const ResolvedConfig cfg = resolve(config, instance.arms(), instance.sigma);
  LinFederation fed(instance, cfg);
  RunResult res = detail::run_event_triggered(fed, cfg, false, log);
  res.lp_fallbacks = fed.lp_fallbacks();
  if (res.terminated) {
    const double bound = linear_comm_bound(cfg.agents, cfg.gamma1, cfg.gamma2.value(),
                                           instance.dim(), cfg.lambda, res.tau);
    if (static_cast<double>(res.comm_cost) > bound) bound_violation(res, bound);
  }
  return res;
}

}  // namespace fedpex
