#include <doctest.h>

#include <Eigen/Dense>

#include "fedpex/baselines.hpp"
#include "fedpex/runner.hpp"

using namespace fedpex;

namespace {

MabInstance gen_mab(double gap, std::uint64_t seed) {
  Rng rng(seed, Rng::Stream::kInstance);
  return gen_gap_instance_mab(5, gap, 0.3, rng);
}

LinearInstance gen_linear(double gap, std::uint64_t seed) {
  Rng rng(seed, Rng::Stream::kInstance);
  return gen_gap_instance_linear(5, 5, gap, 0.3, rng);
}

}  // namespace

TEST_CASE("single agent on a noiseless bandit") {
  MabInstance inst;
  inst.means = Eigen::Vector3d(0.2, 0.9, 0.4);
  inst.sigma = 0.0;
  RunConfig cfg;
  cfg.epsilon = 0.1;
  AuditLog log;
  const auto r = run_single_agent(inst, cfg, &log);
  CHECK(r.terminated);
  CHECK(r.best_arm_est == 1);
  CHECK(r.uploads == log.size());
  for (const auto& rec : log) {
    CHECK(rec.agent == 0);
    CHECK(rec.uploaded);
  }
  cfg.seed = 99;
  const auto again = run_single_agent(inst, cfg);
  CHECK(again.tau == r.tau);
}

TEST_CASE("single agent flushes every round") {
  const auto inst = gen_mab(0.3, 1);
  RunConfig cfg;
  cfg.audit = true;
  cfg.agents = 7;  // ignored
  const auto r = run_single_agent(inst, cfg);
  CHECK(r.terminated);
  CHECK(r.correct);
  CHECK(r.init_comm == 5 + 1);
  CHECK(r.uploads == r.tau - 5);

  const auto lin = gen_linear(0.3, 2);
  RunConfig lcfg;
  lcfg.epsilon = 0.05;
  lcfg.audit = true;
  const auto lr = run_single_agent(lin, lcfg);
  CHECK(lr.terminated);
  CHECK(lr.correct);
}

TEST_CASE("single agent is deterministic") {
  const auto inst = gen_linear(0.2, 3);
  RunConfig cfg;
  cfg.seed = 11;
  const auto a = run_single_agent(inst, cfg);
  const auto b = run_single_agent(inst, cfg);
  CHECK(a.tau == b.tau);
  CHECK(a.pulls_per_arm == b.pulls_per_arm);
  CHECK(a.final_index == b.final_index);
}

TEST_CASE("synchronous cost is two messages per agent per sync") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto inst = gen_mab(0.3, seed);
    SyncConfig cfg;
    cfg.run.seed = seed;
    cfg.run.audit = true;
    cfg.episode_len = 100;
    const auto r = run_synchronous(inst, cfg);
    CHECK(r.terminated);
    CHECK(r.correct);
    CHECK(r.tau % (10 * 100) == 0);
    CHECK(r.comm_cost * 50 == r.tau);
    CHECK(r.uploads == r.downloads);
    CHECK(r.comm_cost % 20 == 0);
    CHECK(r.switch_cost <= r.downloads);
  }
}

TEST_CASE("synchronous linear cost identity") {
  const auto inst = gen_linear(0.4, 1);
  SyncConfig cfg;
  cfg.run.epsilon = 0.05;
  cfg.episode_len = 10;
  const auto r = run_synchronous(inst, cfg);
  CHECK(r.terminated);
  CHECK(r.comm_cost == 2 * 10 * (r.tau / (10 * 10)));
  CHECK(r.tau % 100 == 0);
}

TEST_CASE("one agent with unit episodes matches the single-agent run") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto inst = gen_mab(0.3, seed);
    RunConfig run;
    run.seed = seed;
    run.agents = 1;
    AuditLog single_log, sync_log;
    const auto a = run_single_agent(inst, run, &single_log);
    const auto b = run_synchronous(inst, SyncConfig{run, 1}, &sync_log);
    CHECK(a.tau == b.tau);
    CHECK(a.pulls_per_arm == b.pulls_per_arm);
    CHECK(a.best_arm_est == b.best_arm_est);
    CHECK(a.final_index == b.final_index);
    REQUIRE(sync_log.size() == single_log.size() + 5);
    for (std::size_t n = 0; n < single_log.size(); ++n) CHECK(single_log[n].arm == sync_log[n + 5].arm);

    const auto lin = gen_linear(0.3, seed);
    run.epsilon = 0.05;
    const auto c = run_single_agent(lin, run);
    const auto d = run_synchronous(lin, SyncConfig{run, 1});
    CHECK(c.tau == d.tau);
    CHECK(c.pulls_per_arm == d.pulls_per_arm);
  }
}

TEST_CASE("agents share one frozen target within an episode") {
  const auto inst = gen_mab(0.2, 4);
  SyncConfig cfg;
  cfg.episode_len = 20;
  cfg.run.agents = 4;
  AuditLog log;
  const auto r = run_synchronous(inst, cfg, &log);
  CHECK(r.tau == log.size());
  const std::uint64_t per_episode = 20 * 4;
  // Skip the first episode, which cycles arms before any statistics exist.
  for (std::uint64_t e = 1; e < r.tau / per_episode; ++e) {
    const auto first = log[e * per_episode].arm;
    for (std::uint64_t n = 0; n < per_episode; ++n) CHECK(log[e * per_episode + n].arm == first);
  }
}

TEST_CASE("episode length must be positive") {
  const auto inst = gen_mab(0.3, 1);
  SyncConfig cfg;
  cfg.episode_len = 0;
  CHECK_THROWS(run_synchronous(inst, cfg));
}
