#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "fedpex/rng.hpp"

namespace fedpex {

/// K-armed Gaussian bandit.
struct MabInstance {
  Eigen::VectorXd means;
  double sigma = 0.0;

  std::size_t arms() const { return static_cast<std::size_t>(means.size()); }
  std::size_t best_arm() const;
  /// mu(k*) - mu(arm).
  double gap(std::size_t arm) const;
  /// Throws ParameterError when K < 2, sigma < 0 or the maximum is not unique.
  void validate() const;
};

/// Linear bandit. Column k of `contexts` is the context x_k (d x K storage).
struct LinearInstance {
  Eigen::MatrixXd contexts;
  Eigen::VectorXd theta;
  double sigma = 0.0;

  std::size_t dim() const { return static_cast<std::size_t>(contexts.rows()); }
  std::size_t arms() const { return static_cast<std::size_t>(contexts.cols()); }
  Eigen::VectorXd expected_rewards() const { return contexts.transpose() * theta; }
  std::size_t best_arm() const;
  double gap(std::size_t arm) const;
  void validate() const;
};

double sample_reward(const MabInstance& inst, std::size_t arm, Rng& rng);
double sample_reward(const LinearInstance& inst, std::size_t arm, Rng& rng);

MabInstance gen_gap_instance_mab(std::size_t arms, double gap, double sigma, Rng& rng);
LinearInstance gen_gap_instance_linear(std::size_t dim, std::size_t arms, double gap, double sigma,
                                       Rng& rng);

/// Position of the strict maximum, lowest index on ties.
template <typename Derived>
std::size_t argmax(const Eigen::DenseBase<Derived>& v) {
  std::size_t best = 0;
  for (Eigen::Index k = 1; k < v.size(); ++k) {
    if (v(k) > v(static_cast<Eigen::Index>(best))) best = static_cast<std::size_t>(k);
  }
  return best;
}

}  // namespace fedpex
