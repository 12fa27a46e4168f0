#pragma once

#include <cstdint>

#include "fedpex/config.hpp"
#include "fedpex/instance.hpp"

namespace fedpex {

struct SyncConfig {
  RunConfig run;
  std::uint64_t episode_len = 100;
};

/// One agent sharing every sample immediately (UGapE-style / LinGapE-style
/// with the federated confidence widths at M = 1). The agent count in
/// `config` is ignored and the gamma defaults are taken at M = 1.
RunResult run_single_agent(const MabInstance& instance, const RunConfig& config,
                           AuditLog* log = nullptr);
RunResult run_single_agent(const LinearInstance& instance, const RunConfig& config,
                           AuditLog* log = nullptr);

/// All M agents pull every global round and synchronize every
/// `episode_len` global rounds. comm_cost = 2M * synchronizations.
RunResult run_synchronous(const MabInstance& instance, const SyncConfig& config,
                          AuditLog* log = nullptr);
RunResult run_synchronous(const LinearInstance& instance, const SyncConfig& config,
                          AuditLog* log = nullptr);

}  // namespace fedpex
