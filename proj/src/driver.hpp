#pragma once

// Round loops shared by the federated algorithms and the baselines. A
// protocol type (MabFederation, LinFederation) supplies the statistics; the
// drivers own scheduling, sampling, message accounting and auditing.

#include <optional>
#include <string>
#include <vector>

#include "fedpex/config.hpp"
#include "fedpex/errors.hpp"
#include "fedpex/rng.hpp"

namespace fedpex::detail {

template <class Protocol>
void finish(RunResult& res, const Protocol& proto, double epsilon) {
  res.best_arm_true = proto.instance().best_arm();
  res.correct = proto.instance().gap(res.best_arm_est) <= epsilon;
  res.comm_cost = res.uploads + res.downloads;
}

/// Sequential initialization pulls followed by the asynchronous loop: one
/// active agent per round, upload when the trigger fires (or every round when
/// `force_upload`), stop check at uploads, download when not stopping.
template <class Protocol>
RunResult run_event_triggered(Protocol& proto, const ResolvedConfig& cfg, bool force_upload,
                              AuditLog* log) {
  Rng rewards(cfg.seed, Rng::Stream::kRewards);
  Rng activation(cfg.seed, Rng::Stream::kActivation);
  const std::size_t arms = proto.arms();
  const std::size_t agents = proto.agents();

  RunResult res;
  res.pulls_per_arm.assign(arms, 0);

  std::vector<double> first(arms);
  for (std::size_t k = 0; k < arms; ++k) {
    first[k] = proto.sample(k, rewards);
    res.pulls_per_arm[k] = 1;
  }
  proto.initialize(first);
  res.tau = arms;
  res.init_comm = arms + agents;

  // Arm each agent has pulled since its last download, for the frozen-target audit.
  std::vector<std::optional<std::size_t>> frozen(agents);

  while (res.tau < cfg.max_rounds) {
    std::size_t m = 0;
    if (agents > 1) {
      m = cfg.activation == Activation::kUniform ? activation.index(agents)
                                                 : static_cast<std::size_t>((res.tau - arms) % agents);
    }
    const std::size_t arm = proto.target(m);
    if (cfg.audit) {
      if (frozen[m] && *frozen[m] != arm) {
        throw InvariantViolation("agent " + std::to_string(m) + " switched arms without a download");
      }
      frozen[m] = arm;
    }

    proto.record(m, arm, proto.sample(arm, rewards));
    ++res.tau;
    ++res.pulls_per_arm[arm];

    AuditRecord rec;
    rec.t = res.tau;
    rec.agent = m;
    rec.arm = arm;
    rec.triggered = proto.should_upload(m);
    rec.uploaded = force_upload || rec.triggered;

    if (rec.uploaded) {
      ++res.uploads;
      proto.upload(m);
      const auto pair = proto.server_index();
      rec.index = pair.index;
      res.final_index = pair.index;
      res.best_arm_est = pair.i;
      if (pair.index <= cfg.epsilon) {
        rec.stopped = true;
        res.terminated = true;
      } else {
        ++res.downloads;
        if (proto.download(m)) ++res.switch_cost;
        frozen[m].reset();
      }
    }

    if (cfg.audit) {
      proto.audit_conservation(res.pulls_per_arm);
      if (!rec.uploaded) proto.audit_quiet_round(m);
    }
    if (log) log->push_back(rec);
    if (res.terminated) break;
  }

  if (!res.terminated) {
    const auto pair = proto.server_index();
    res.best_arm_est = pair.i;
    res.final_index = pair.index;
  }
  if (res.switch_cost > res.downloads) throw InvariantViolation("more switches than downloads");
  finish(res, proto, cfg.epsilon);
  return res;
}

/// Fixed-episode schedule: every global round all M agents pull once from
/// statistics frozen at the last synchronization; every `episode_len` global
/// rounds all agents upload and download (2M messages). Until the server has
/// seen every arm, agents cycle through the arms.
template <class Protocol>
RunResult run_episodic(Protocol& proto, const ResolvedConfig& cfg, std::uint64_t episode_len,
                       AuditLog* log) {
  if (episode_len < 1) throw ParameterError("episode length must be at least 1");
  Rng rewards(cfg.seed, Rng::Stream::kRewards);
  const std::size_t arms = proto.arms();
  const std::size_t agents = proto.agents();

  RunResult res;
  res.pulls_per_arm.assign(arms, 0);
  proto.initialize_empty();

  bool have_targets = false;
  std::uint64_t syncs = 0;
  bool capped = false;
  while (!res.terminated && !capped) {
    for (std::uint64_t g = 0; g < episode_len && !capped; ++g) {
      for (std::size_t m = 0; m < agents; ++m) {
        if (res.tau >= cfg.max_rounds) {
          capped = true;
          break;
        }
        const std::size_t arm = have_targets ? proto.target(m) : static_cast<std::size_t>(res.tau % arms);
        proto.record(m, arm, proto.sample(arm, rewards));
        ++res.tau;
        ++res.pulls_per_arm[arm];
        if (log) log->push_back(AuditRecord{res.tau, m, arm, false, false, false, std::nullopt});
      }
    }
    if (capped) break;

    for (std::size_t m = 0; m < agents; ++m) proto.upload(m);
    ++syncs;
    if (cfg.audit) proto.audit_conservation(res.pulls_per_arm);

    const bool ready = proto.server_ready();
    // Stop checks start once a full episode has been played on computed targets.
    if (ready && have_targets) {
      const auto pair = proto.server_index();
      res.final_index = pair.index;
      res.best_arm_est = pair.i;
      if (log && !log->empty()) {
        log->back().uploaded = true;
        log->back().index = pair.index;
      }
      if (pair.index <= cfg.epsilon) {
        res.terminated = true;
        if (log && !log->empty()) log->back().stopped = true;
        break;
      }
    }
    for (std::size_t m = 0; m < agents; ++m) {
      const bool switched = proto.download(m, ready);
      if (switched && have_targets) ++res.switch_cost;
    }
    have_targets = ready;
  }

  res.uploads = syncs * agents;
  res.downloads = syncs * agents;
  if (!res.terminated && proto.server_ready()) {
    const auto pair = proto.server_index();
    res.best_arm_est = pair.i;
    res.final_index = pair.index;
  }
  finish(res, proto, cfg.epsilon);
  return res;
}

}  // namespace fedpex::detail
