#pragma once

#include <cstdint>
#include <vector>

#include "fedpex/config.hpp"
#include "fedpex/instance.hpp"

namespace fedpex {

struct TheoryReport {
  /// H^M or H^L; +infinity when a summand has a zero denominator.
  double complexity = 0.0;
  bool infinite = false;
  std::size_t best_arm = 0;
  std::vector<double> gaps;  ///< Delta(k*, k) per arm
  std::uint64_t tau = 0;     ///< sample count the bound is evaluated at
  double comm_bound = 0.0;
};

/// H = sum_k sigma^2 / max((Delta(k*,k) + eps)/3, eps)^2, and the
/// communication bound at `tau`.
TheoryReport compute_theory_diagnostics(const MabInstance& instance, const RunConfig& config,
                                        std::uint64_t tau);

/// H = sum_k max_{i != j} rho(y(i,j)) p_k(y(i,j)) /
///       max((Delta(k*,i) + eps)/3, (Delta(k*,j) + eps)/3, eps)^2.
TheoryReport compute_theory_diagnostics(const LinearInstance& instance, const RunConfig& config,
                                        std::uint64_t tau);

}  // namespace fedpex
