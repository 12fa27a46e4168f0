#include "fedpex/config.hpp"

#include <algorithm>
#include <cmath>

#include "fedpex/errors.hpp"

namespace fedpex {

GrowthThreshold GrowthThreshold::rational(std::int64_t num, std::int64_t den) {
  if (num <= 0 || den <= 0) throw ParameterError("threshold must be a positive fraction");
  GrowthThreshold g;
  g.num_ = num;
  g.den_ = den;
  g.value_ = static_cast<double>(num) / static_cast<double>(den);
  return g;
}

GrowthThreshold GrowthThreshold::real(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ParameterError("threshold must be > 0");
  GrowthThreshold g;
  g.value_ = gamma;
  return g;
}

GrowthThreshold GrowthThreshold::parse(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash != std::string::npos) {
      std::size_t used_num = 0;
      std::size_t used_den = 0;
      const std::string num = text.substr(0, slash);
      const std::string den = text.substr(slash + 1);
      const long long n = std::stoll(num, &used_num);
      const long long d = std::stoll(den, &used_den);
      if (used_num != num.size() || used_den != den.size()) throw std::invalid_argument(text);
      return rational(n, d);
    }
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return real(v);
  } catch (const ParameterError&) {
    throw;
  } catch (const std::exception&) {
    throw ParameterError("cannot parse threshold '" + text + "'");
  }
}

bool GrowthThreshold::exceeded(std::int64_t total, std::int64_t base) const {
  if (is_exact()) {
    // total * den > (den + num) * base
    const auto lhs = static_cast<__int128>(total) * den_;
    const auto rhs = static_cast<__int128>(den_ + num_) * base;
    return lhs > rhs;
  }
  return static_cast<double>(total) > (1.0 + value_) * static_cast<double>(base);
}

double lambda_cap(double sigma, double gamma1, std::size_t agents, double delta) {
  const double m = static_cast<double>(agents);
  const double coeff = std::sqrt(1.0 + gamma1 * m) + std::sqrt(2.0 * gamma1) * m;
  return sigma * sigma * coeff * coeff * std::log(2.0 / delta);
}

ResolvedConfig resolve(const RunConfig& cfg, std::size_t arms, double sigma) {
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw ParameterError("delta must lie in (0, 1)");
  if (!(cfg.epsilon >= 0.0 && cfg.epsilon < 1.0)) throw ParameterError("epsilon must lie in [0, 1)");
  if (cfg.agents < 1) throw ParameterError("need at least one agent");
  if (cfg.max_rounds <= arms) throw ParameterError("max_rounds must exceed the arm count");

  const auto m = static_cast<std::int64_t>(cfg.agents);
  const auto k = static_cast<std::int64_t>(arms);

  ResolvedConfig r;
  r.delta = cfg.delta;
  r.epsilon = cfg.epsilon;
  r.agents = cfg.agents;
  r.gamma = cfg.gamma.value_or(GrowthThreshold::rational(1, 2 * m * k));
  r.gamma2 = cfg.gamma2.value_or(GrowthThreshold::rational(1, 2 * m * k));
  r.gamma1 = cfg.gamma1 ? *cfg.gamma1 : 1.0 / static_cast<double>(m * m);
  if (!(r.gamma1 > 0.0)) throw ParameterError("gamma1 must be > 0");

  const double cap = lambda_cap(sigma, r.gamma1, cfg.agents, cfg.delta);
  if (cfg.lambda) {
    if (!(*cfg.lambda > 0.0)) throw ParameterError("lambda must be > 0");
    r.lambda = *cfg.lambda;
    r.lambda_exceeds_cap = r.lambda > cap;
  } else {
    // sigma = 0 collapses the cap to zero; keep lambda strictly positive.
    r.lambda = cap > 0.0 ? std::min(1.0, cap) : 1.0;
    r.lambda_exceeds_cap = r.lambda > cap;
  }
  r.arm_select = cfg.arm_select;
  r.greedy_sense = cfg.greedy_sense;
  r.activation = cfg.activation;
  r.seed = cfg.seed;
  r.max_rounds = cfg.max_rounds;
  r.audit = cfg.audit;
  return r;
}

}  // namespace fedpex
