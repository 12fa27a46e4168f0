#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fedpex {

/// Relative growth threshold gamma for "total > (1 + gamma) * base" checks.
/// Rational thresholds are compared in exact integer arithmetic.
class GrowthThreshold {
 public:
  static GrowthThreshold rational(std::int64_t num, std::int64_t den);
  static GrowthThreshold real(double gamma);
  /// Accepts "num/den" (exact) or a decimal literal.
  static GrowthThreshold parse(const std::string& text);

  double value() const { return value_; }
  bool is_exact() const { return den_ > 0; }
  /// True iff total > (1 + gamma) * base.
  bool exceeded(std::int64_t total, std::int64_t base) const;

 private:
  double value_ = 0.0;
  std::int64_t num_ = 0;
  std::int64_t den_ = 0;
};

enum class ArmSelect { kLp, kGreedy };
enum class GreedySense { kMin, kMax };
enum class Activation { kUniform, kRoundRobin };

struct RunConfig {
  double delta = 0.05;
  double epsilon = 0.0;
  std::size_t agents = 10;
  // Unset parameters take the theorem defaults for the instance size.
  std::optional<GrowthThreshold> gamma;
  std::optional<double> gamma1;
  std::optional<GrowthThreshold> gamma2;
  std::optional<double> lambda;
  ArmSelect arm_select = ArmSelect::kLp;
  GreedySense greedy_sense = GreedySense::kMin;
  Activation activation = Activation::kUniform;
  std::uint64_t seed = 0;
  std::uint64_t max_rounds = 10'000'000;
  /// Per-round invariant auditing. Never changes the result.
  bool audit = false;
};

/// RunConfig with every default filled in for a given instance shape.
struct ResolvedConfig {
  double delta = 0.05;
  double epsilon = 0.0;
  std::size_t agents = 1;
  GrowthThreshold gamma;
  double gamma1 = 1.0;
  GrowthThreshold gamma2;
  double lambda = 1.0;
  bool lambda_exceeds_cap = false;
  ArmSelect arm_select = ArmSelect::kLp;
  GreedySense greedy_sense = GreedySense::kMin;
  Activation activation = Activation::kUniform;
  std::uint64_t seed = 0;
  std::uint64_t max_rounds = 10'000'000;
  bool audit = false;
};

/// Largest ridge parameter covered by the linear confidence bound:
/// sigma^2 (sqrt(1 + gamma1 M) + sqrt(2 gamma1) M)^2 log(2 / delta).
double lambda_cap(double sigma, double gamma1, std::size_t agents, double delta);

/// Validates and fills defaults: gamma = gamma2 = 1/(2MK), gamma1 = 1/M^2,
/// lambda = min(1, cap). Throws ParameterError.
ResolvedConfig resolve(const RunConfig& cfg, std::size_t arms, double sigma);

struct RunResult {
  std::size_t best_arm_est = 0;
  std::size_t best_arm_true = 0;
  bool correct = false;
  std::uint64_t tau = 0;
  std::uint64_t comm_cost = 0;
  std::uint64_t init_comm = 0;
  std::uint64_t switch_cost = 0;
  std::uint64_t uploads = 0;
  std::uint64_t downloads = 0;
  std::vector<std::uint64_t> pulls_per_arm;
  bool terminated = false;
  /// Rounds where the design program was infeasible and the greedy rule was used.
  std::uint64_t lp_fallbacks = 0;
  double final_index = 0.0;
};

/// One round after initialization.
struct AuditRecord {
  std::uint64_t t = 0;
  std::size_t agent = 0;
  std::size_t arm = 0;
  bool triggered = false;
  bool uploaded = false;
  bool stopped = false;
  std::optional<double> index;
};

using AuditLog = std::vector<AuditRecord>;

}  // namespace fedpex
