#include "fedpex/baselines.hpp"

#include "driver.hpp"
#include "fedpex/linear_pe.hpp"
#include "fedpex/mab_pe.hpp"

namespace fedpex {
namespace {

RunConfig single(const RunConfig& config) {
  RunConfig c = config;
  c.agents = 1;
  return c;
}

}  // namespace

RunResult run_single_agent(const MabInstance& instance, const RunConfig& config, AuditLog* log) {
  const ResolvedConfig cfg = resolve(single(config), instance.arms(), instance.sigma);
  MabFederation fed(instance, cfg);
  return detail::run_event_triggered(fed, cfg, true, log);
}

RunResult run_single_agent(const LinearInstance& instance, const RunConfig& config,
                           AuditLog* log) {
  const ResolvedConfig cfg = resolve(single(config), instance.arms(), instance.sigma);
  LinFederation fed(instance, cfg);
  RunResult res = detail::run_event_triggered(fed, cfg, true, log);
  res.lp_fallbacks = fed.lp_fallbacks();
  return res;
}

RunResult run_synchronous(const MabInstance& instance, const SyncConfig& config, AuditLog* log) {
  const ResolvedConfig cfg = resolve(config.run, instance.arms(), instance.sigma);
  MabFederation fed(instance, cfg);
  return detail::run_episodic(fed, cfg, config.episode_len, log);
}

RunResult run_synchronous(const LinearInstance& instance, const SyncConfig& config,
                          AuditLog* log) {
  const ResolvedConfig cfg = resolve(config.run, instance.arms(), instance.sigma);
  LinFederation fed(instance, cfg);
  RunResult res = detail::run_episodic(fed, cfg, config.episode_len, log);
  res.lp_fallbacks = fed.lp_fallbacks();
  return res;
}

}  // namespace fedpex
