#pragma once

#include <cstdint>

#include "fedpex/config.hpp"
#include "fedpex/instance.hpp"

namespace fedpex {

/// Federated asynchronous best-arm identification on a K-armed bandit.
/// Throws InvariantViolation if the run breaks the communication bound or,
/// with auditing on, any per-round invariant.
RunResult run_famabpe(const MabInstance& instance, const RunConfig& config,
                      AuditLog* log = nullptr);

/// Federated asynchronous best-arm identification on a linear bandit.
RunResult run_falinpe(const LinearInstance& instance, const RunConfig& config,
                      AuditLog* log = nullptr);

/// 2 (M + 1/gamma) log2(tau).
double mab_comm_bound(std::size_t agents, double gamma, std::uint64_t tau);

/// 2 ((M + 1/g1) d log2(1 + tau/(lambda d)) + (M + 1/g2) log2(tau)).
double linear_comm_bound(std::size_t agents, double gamma1, double gamma2, std::size_t dim,
                         double lambda, std::uint64_t tau);

}  // namespace fedpex
