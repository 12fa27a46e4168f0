#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fedpex/baselines.hpp"
#include "fedpex/config.hpp"
#include "fedpex/instance_io.hpp"

namespace fedpex::cli {

enum class Algo { kFamabpe, kFalinpe, kUgapecSingle, kUgapecSync, kLingapeSingle, kLingapeSync };

Algo parse_algo(const std::string& name);
std::string algo_name(Algo algo);
bool needs_linear(Algo algo);

/// Results CSV, schema version 1. Column order is frozen within a version.
inline constexpr int kCsvSchemaVersion = 1;
std::string csv_header();

struct LabeledInstance {
  std::string label;
  AnyInstance instance;
};

struct ExperimentSpec {
  Algo algo = Algo::kFamabpe;
  std::vector<LabeledInstance> instances;
  RunConfig config;
  std::uint64_t episode_len = 100;
  std::uint64_t reps = 1;
  std::uint64_t seed_base = 0;
  unsigned jobs = 1;
};

struct ExperimentRow {
  std::string algo;
  std::string instance;
  std::uint64_t seed = 0;
  RunResult result;
  double runtime_ms = 0.0;
};

/// Runs every (instance, seed) job; rows come back in (instance, seed) order
/// regardless of `jobs`. Throws ParameterError on algo/instance mismatch.
std::vector<ExperimentRow> run_experiment(const ExperimentSpec& spec);

RunResult run_one(Algo algo, const AnyInstance& instance, const RunConfig& config,
                  std::uint64_t episode_len);

/// One CSV line (no newline). With `timing` false, runtime_ms is written as 0
/// so repeated runs are byte-identical.
std::string csv_row(const ExperimentRow& row, bool timing = true);

/// Parses "start:stop:step" (inclusive of stop up to rounding).
std::vector<double> parse_sweep(const std::string& text);

/// Entry point. Exit codes: 0 success, 1 runtime or invariant failure, 2 usage.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fedpex::cli
