#include "fedpex/instance.hpp"

#include <cmath>
#include <string>

#include "fedpex/errors.hpp"

namespace fedpex {
namespace {

constexpr int kMaxArmAttempts = 100000;
constexpr int kMaxRankAttempts = 1000;
constexpr double kNormSlack = 1e-12;
// Keeps the realised gap >= the requested gap after rounding.
constexpr double kGapMargin = 1e-12;

void check_arm(std::size_t arm, std::size_t arms) {
  if (arm >= arms) {
    throw IndexError("arm " + std::to_string(arm) + " out of range [0, " + std::to_string(arms) +
                     ")");
  }
}

bool unique_max(const Eigen::VectorXd& v) {
  const std::size_t best = argmax(v);
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (static_cast<std::size_t>(k) != best && v(k) == v(static_cast<Eigen::Index>(best))) {
      return false;
    }
  }
  return true;
}

Eigen::VectorXd unit_direction(std::size_t dim, Rng& rng) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(dim));
  do {
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.normal();
  } while (v.norm() < 1e-9);
  return v / v.norm();
}

// Uniform in the closed unit ball.
Eigen::VectorXd in_unit_ball(std::size_t dim, Rng& rng) {
  const double radius = std::pow(rng.uniform(0.0, 1.0), 1.0 / static_cast<double>(dim));
  return radius * unit_direction(dim, rng);
}

}  // namespace

std::size_t MabInstance::best_arm() const { return argmax(means); }

double MabInstance::gap(std::size_t arm) const {
  check_arm(arm, arms());
  return means(static_cast<Eigen::Index>(best_arm())) - means(static_cast<Eigen::Index>(arm));
}

void MabInstance::validate() const {
  if (arms() < 2) throw ParameterError("MAB instance needs at least 2 arms");
  if (!(sigma >= 0.0)) throw ParameterError("sigma must be non-negative");
  if (!means.allFinite()) throw ParameterError("means must be finite");
  if (!unique_max(means)) throw ParameterError("best arm is not unique");
}

std::size_t LinearInstance::best_arm() const { return argmax(expected_rewards()); }

double LinearInstance::gap(std::size_t arm) const {
  check_arm(arm, arms());
  const Eigen::VectorXd r = expected_rewards();
  return r(static_cast<Eigen::Index>(best_arm())) - r(static_cast<Eigen::Index>(arm));
}

void LinearInstance::validate() const {
  if (dim() < 1) throw ParameterError("context dimension must be at least 1");
  if (arms() < 2) throw ParameterError("linear instance needs at least 2 arms");
  if (theta.size() != contexts.rows()) throw ParameterError("theta dimension mismatch");
  if (!(sigma >= 0.0)) throw ParameterError("sigma must be non-negative");
  if (!contexts.allFinite() || !theta.allFinite()) throw ParameterError("non-finite entries");
  if (theta.norm() > 1.0 + kNormSlack) throw ParameterError("||theta|| must be <= 1");
  for (Eigen::Index k = 0; k < contexts.cols(); ++k) {
    if (contexts.col(k).norm() > 1.0 + kNormSlack) {
      throw ParameterError("||x_" + std::to_string(k) + "|| must be <= 1");
    }
  }
  if (!unique_max(expected_rewards())) throw ParameterError("best arm is not unique");
}

double sample_reward(const MabInstance& inst, std::size_t arm, Rng& rng) {
  check_arm(arm, inst.arms());
  return inst.means(static_cast<Eigen::Index>(arm)) + inst.sigma * rng.normal();
}

double sample_reward(const LinearInstance& inst, std::size_t arm, Rng& rng) {
  check_arm(arm, inst.arms());
  return inst.contexts.col(static_cast<Eigen::Index>(arm)).dot(inst.theta) +
         inst.sigma * rng.normal();
}

MabInstance gen_gap_instance_mab(std::size_t arms, double gap, double sigma, Rng& rng) {
  if (arms < 2) throw ParameterError("need at least 2 arms");
  if (!(gap > 0.0 && gap < 1.0)) throw ParameterError("gap must lie in (0, 1)");
  MabInstance inst;
  inst.sigma = sigma;
  inst.means.resize(static_cast<Eigen::Index>(arms));
  const std::size_t best = rng.index(arms);
  const double top = rng.uniform(gap, 1.0);
  for (std::size_t k = 0; k < arms; ++k) {
    inst.means(static_cast<Eigen::Index>(k)) = k == best ? top : rng.uniform(0.0, top - gap - kGapMargin);
  }
  inst.validate();
  return inst;
}

LinearInstance gen_gap_instance_linear(std::size_t dim, std::size_t arms, double gap, double sigma,
                                       Rng& rng) {
  if (dim < 1) throw ParameterError("dimension must be at least 1");
  if (arms < dim) throw ParameterError("need K >= d so the contexts can span R^d");
  if (arms < 2) throw ParameterError("need at least 2 arms");
  if (!(gap > 0.0 && gap < 1.0)) throw ParameterError("gap must lie in (0, 1)");

  LinearInstance inst;
  inst.sigma = sigma;
  inst.theta = unit_direction(dim, rng);
  inst.contexts.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(arms));

  for (int attempt = 0; attempt < kMaxRankAttempts; ++attempt) {
    const std::size_t best = rng.index(arms);
    // Optimal context on the unit sphere with reward above the gap, so that
    // the half-ball {x : x'theta <= 0} is always admissible for the others.
    Eigen::VectorXd top;
    int tries = 0;
    do {
      top = unit_direction(dim, rng);
    } while (top.dot(inst.theta) <= gap && ++tries < kMaxArmAttempts);
    if (top.dot(inst.theta) <= gap) continue;
    const double ceiling = top.dot(inst.theta) - gap - kGapMargin;

    bool ok = true;
    for (std::size_t k = 0; k < arms && ok; ++k) {
      auto col = inst.contexts.col(static_cast<Eigen::Index>(k));
      if (k == best) {
        col = top;
        continue;
      }
      ok = false;
      for (int t = 0; t < kMaxArmAttempts; ++t) {
        Eigen::VectorXd x = in_unit_ball(dim, rng);
        if (x.dot(inst.theta) <= ceiling) {
          col = x;
          ok = true;
          break;
        }
      }
    }
    if (!ok) continue;

    Eigen::FullPivLU<Eigen::MatrixXd> lu(inst.contexts);
    lu.setThreshold(1e-8);
    if (static_cast<std::size_t>(lu.rank()) == dim) {
      inst.validate();
      return inst;
    }
  }
  throw GenerationError("could not generate a linear instance with the requested gap and rank");
}

}  // namespace fedpex
