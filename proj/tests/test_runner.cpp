#include <doctest.h>

#include <Eigen/Dense>

#include <map>

#include "fedpex/diagnostics.hpp"
#include "fedpex/errors.hpp"
#include "fedpex/runner.hpp"
#include "oracles.hpp"

using namespace fedpex;

namespace {

MabInstance reference_mab(double gap, std::uint64_t seed) {
  Rng rng(seed, Rng::Stream::kInstance);
  return gen_gap_instance_mab(5, gap, 0.3, rng);
}

LinearInstance reference_linear(double gap, std::uint64_t seed) {
  Rng rng(seed, Rng::Stream::kInstance);
  return gen_gap_instance_linear(5, 5, gap, 0.3, rng);
}

std::uint64_t sum(const std::vector<std::uint64_t>& v) {
  std::uint64_t s = 0;
  for (auto x : v) s += x;
  return s;
}

// Every agent pulls one arm between consecutive downloads.
void check_frozen_targets(const AuditLog& log) {
  std::map<std::size_t, std::size_t> current;
  for (const auto& rec : log) {
    auto it = current.find(rec.agent);
    if (it != current.end()) CHECK(it->second == rec.arm);
    current[rec.agent] = rec.arm;
    if (rec.uploaded && !rec.stopped) current.erase(rec.agent);
  }
}

void check_accounting(const RunResult& r, std::size_t arms, std::size_t agents) {
  CHECK(sum(r.pulls_per_arm) == r.tau);
  CHECK(r.comm_cost == r.uploads + r.downloads);
  CHECK(r.switch_cost <= r.downloads);
  CHECK(r.init_comm == arms + agents);
  if (r.terminated) {
    CHECK(r.uploads == r.downloads + 1);
    CHECK(r.comm_cost % 2 == 1);
  }
}

}  // namespace

TEST_CASE("noiseless two-arm bandit") {
  MabInstance inst;
  inst.means = Eigen::Vector2d(1.0, 0.0);
  inst.sigma = 0.0;
  RunConfig cfg;
  cfg.epsilon = 0.5;
  cfg.agents = 3;
  const auto r = run_famabpe(inst, cfg);
  CHECK(r.terminated);
  CHECK(r.best_arm_est == 0);
  CHECK(r.correct);
  check_accounting(r, 2, 3);
}

TEST_CASE("noiseless linear bandit") {
  LinearInstance inst;
  inst.contexts = Eigen::Matrix2d::Identity();
  inst.theta = Eigen::Vector2d(1.0, 0.0);
  inst.sigma = 0.0;
  RunConfig cfg;
  cfg.epsilon = 0.5;
  cfg.agents = 2;
  const auto r = run_falinpe(inst, cfg);
  CHECK(r.terminated);
  CHECK(r.best_arm_est == 0);
  CHECK(r.correct);
  check_accounting(r, 2, 2);
}

TEST_CASE("five-arm ten-agent configuration identifies the best arm") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto inst = reference_mab(0.3, 1);
    RunConfig cfg;
    cfg.seed = seed;
    const auto r = run_famabpe(inst, cfg);
    CHECK(r.terminated);
    CHECK(r.best_arm_est == inst.best_arm());
    CHECK(static_cast<double>(r.comm_cost) <= mab_comm_bound(10, 1.0 / 100, r.tau));
    check_accounting(r, 5, 10);
  }
}

TEST_CASE("both linear selectors identify the best arm") {
  for (auto rule : {ArmSelect::kLp, ArmSelect::kGreedy}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto inst = reference_linear(0.3, seed);
      RunConfig cfg;
      cfg.seed = seed;
      cfg.epsilon = 0.05;
      cfg.arm_select = rule;
      const auto r = run_falinpe(inst, cfg);
      CHECK(r.terminated);
      CHECK(r.correct);
      const auto rc = resolve(cfg, 5, 0.3);
      CHECK(static_cast<double>(r.comm_cost) <=
            linear_comm_bound(10, rc.gamma1, rc.gamma2.value(), 5, rc.lambda, r.tau));
      CHECK(r.lp_fallbacks == 0);
      check_accounting(r, 5, 10);
    }
  }
}

TEST_CASE("runs are deterministic and auditing does not change them") {
  const auto inst = reference_mab(0.2, 3);
  RunConfig cfg;
  cfg.seed = 77;
  const auto a = run_famabpe(inst, cfg);
  cfg.audit = true;
  AuditLog log;
  const auto b = run_famabpe(inst, cfg, &log);
  CHECK(a.tau == b.tau);
  CHECK(a.comm_cost == b.comm_cost);
  CHECK(a.switch_cost == b.switch_cost);
  CHECK(a.pulls_per_arm == b.pulls_per_arm);
  CHECK(a.final_index == b.final_index);
  CHECK(log.size() == b.tau - 5);
  check_frozen_targets(log);

  const auto lin = reference_linear(0.3, 4);
  RunConfig lcfg;
  lcfg.seed = 5;
  const auto c = run_falinpe(lin, lcfg);
  lcfg.audit = true;
  AuditLog llog;
  const auto d = run_falinpe(lin, lcfg, &llog);
  CHECK(c.tau == d.tau);
  CHECK(c.comm_cost == d.comm_cost);
  CHECK(c.pulls_per_arm == d.pulls_per_arm);
  CHECK(llog.size() == d.tau - 5);
  check_frozen_targets(llog);
}

TEST_CASE("round-robin activation") {
  const auto inst = reference_mab(0.3, 2);
  RunConfig cfg;
  cfg.activation = Activation::kRoundRobin;
  cfg.audit = true;
  AuditLog log;
  const auto r = run_famabpe(inst, cfg, &log);
  CHECK(r.terminated);
  for (std::size_t n = 0; n < log.size(); ++n) CHECK(log[n].agent == n % 10);
}

TEST_CASE("stopping happens only at uploads") {
  const auto inst = reference_mab(0.3, 6);
  RunConfig cfg;
  AuditLog log;
  const auto r = run_famabpe(inst, cfg, &log);
  std::uint64_t uploads = 0;
  for (std::size_t n = 0; n < log.size(); ++n) {
    CHECK(log[n].t == 5 + n + 1);
    if (log[n].stopped) {
      CHECK(log[n].uploaded);
      CHECK(n + 1 == log.size());
      CHECK(*log[n].index <= cfg.epsilon);
    }
    if (log[n].uploaded) {
      ++uploads;
      CHECK(log[n].index.has_value());
    } else {
      CHECK_FALSE(log[n].index.has_value());
    }
  }
  CHECK(uploads == r.uploads);
}

TEST_CASE("round cap ends the run without termination") {
  const auto inst = reference_mab(0.1, 1);
  RunConfig cfg;
  cfg.max_rounds = 50;
  const auto r = run_famabpe(inst, cfg);
  CHECK_FALSE(r.terminated);
  CHECK(r.tau == 50);
  CHECK(sum(r.pulls_per_arm) == 50);
}

TEST_CASE("communication bound expressions") {
  const double mab = mab_comm_bound(10, 1.0 / 100, 10000);
  CHECK(mab == doctest::Approx(static_cast<double>(oracle::mab_comm_bound(10, 0.01L, 10000))).epsilon(1e-14));
  CHECK(mab == doctest::Approx(2923.30).epsilon(1e-5));
  const double lin = linear_comm_bound(10, 0.01, 0.01, 5, 0.7, 5000);
  CHECK(lin == doctest::Approx(static_cast<double>(oracle::linear_comm_bound(10, 0.01L, 0.01L, 5, 0.7L, 5000)))
                   .epsilon(1e-14));
}

TEST_CASE("mab complexity example") {
  MabInstance inst;
  inst.means = Eigen::Vector2d(0.5, 0.0);
  inst.sigma = 1.0;
  RunConfig cfg;
  cfg.epsilon = 0.1;
  auto rep = compute_theory_diagnostics(inst, cfg, 10000);
  CHECK_FALSE(rep.infinite);
  CHECK(rep.complexity == doctest::Approx(125.0));
  CHECK(rep.best_arm == 0);
  CHECK(rep.gaps[1] == doctest::Approx(0.5));

  inst.sigma = 2.0;
  CHECK(compute_theory_diagnostics(inst, cfg, 10000).complexity == doctest::Approx(500.0));

  cfg.epsilon = 0.0;
  rep = compute_theory_diagnostics(inst, cfg, 10000);
  CHECK(rep.infinite);
  CHECK(std::isinf(rep.complexity));
}

TEST_CASE("linear complexity on a basis instance") {
  LinearInstance inst;
  inst.contexts = Eigen::Matrix2d::Identity();
  inst.theta = Eigen::Vector2d(1.0, 0.0);
  inst.sigma = 0.3;
  RunConfig cfg;
  cfg.epsilon = 0.1;
  const auto rep = compute_theory_diagnostics(inst, cfg, 1000);
  // Both ordered pairs need w = +-(1, -1): rho = 2, p = (1/2, 1/2), so rho p_k = 1.
  const double denom = std::max({(0.0 + 0.1) / 3.0, (1.0 + 0.1) / 3.0, 0.1});
  CHECK(rep.complexity == doctest::Approx(2.0 / (denom * denom)));
}
