#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include <Eigen/Dense>

namespace fedpex {

/// Minimum-L1 representation of a direction y in the arm contexts.
struct L1Solution {
  Eigen::VectorXd w;  ///< optimal weights, one per arm
  double rho = 0.0;   ///< sum_k |w_k|
  Eigen::VectorXd p;  ///< |w_k| / rho, a probability vector over arms
};

/// Support threshold: arm k is in the design iff p_k > kSupportTol.
inline constexpr double kSupportTol = 1e-12;

/// Solves min sum|w_k| s.t. contexts * w = y (contexts is d x K) with a
/// two-phase primal simplex on the split program w = u - v, u, v >= 0.
/// Throws ZeroTarget for y = 0 and InfeasibleProgram when y is outside the
/// span of the contexts.
L1Solution solve_l1(const Eigen::MatrixXd& contexts, const Eigen::VectorXd& y);

/// argmin over the support of p of counts[k] / p[k]; lowest index on ties.
std::size_t informative_arm_lp(std::span<const std::uint64_t> counts, const Eigen::VectorXd& p);

}  // namespace fedpex
