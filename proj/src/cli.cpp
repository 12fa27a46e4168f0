#include "fedpex/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "fedpex/diagnostics.hpp"
#include "fedpex/errors.hpp"
#include "fedpex/runner.hpp"

namespace fedpex::cli {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

const std::map<std::string, Algo>& algo_table() {
  static const std::map<std::string, Algo> table{
      {"famabpe", Algo::kFamabpe},
      {"falinpe", Algo::kFalinpe},
      {"ugapec-single", Algo::kUgapecSingle},
      {"ugapec-sync", Algo::kUgapecSync},
      {"lingape-single", Algo::kLingapeSingle},
      {"lingape-sync", Algo::kLingapeSync},
  };
  return table;
}

std::string fmt(double v, int digits = 6) {
  std::ostringstream s;
  s << std::setprecision(digits) << v;
  return s.str();
}

std::string format_label_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

bool audit_from_env() {
  const char* v = std::getenv("FEDPEX_AUDIT");
  return v != nullptr && std::string(v) == "1";
}

// Flags shared by `run` and `bounds`.
struct ConfigFlags {
  double delta = 0.05;
  double epsilon = 0.0;
  std::size_t agents = 10;
  std::string gamma;
  std::optional<double> gamma1;
  std::string gamma2;
  std::optional<double> lambda;
  std::string arm_select = "lp";
  std::string greedy_sense = "min";
  std::string activation = "uniform";
  std::uint64_t max_rounds = 10'000'000;

  void attach(CLI::App& app) {
    app.add_option("--delta", delta, "Confidence parameter in (0, 1)");
    app.add_option("--epsilon", epsilon, "Gap tolerance in [0, 1)");
    app.add_option("-m,--agents", agents, "Number of agents")->check(CLI::PositiveNumber);
    app.add_option("--gamma", gamma, "MAB trigger parameter (e.g. 0.01 or 1/100)");
    app.add_option("--gamma1", gamma1, "Determinant trigger parameter");
    app.add_option("--gamma2", gamma2, "Count trigger parameter for the linear case");
    app.add_option("--lambda", lambda, "Ridge parameter");
    app.add_option("--arm-select", arm_select, "Linear arm selection rule")
        ->check(CLI::IsMember({"lp", "greedy"}));
    app.add_option("--greedy-sense", greedy_sense, "Greedy rule direction")
        ->check(CLI::IsMember({"min", "max"}));
    app.add_option("--activation", activation, "Agent activation schedule")
        ->check(CLI::IsMember({"uniform", "round-robin"}));
    app.add_option("--max-rounds", max_rounds, "Safety cap on the sample count");
  }

  RunConfig to_config() const {
    RunConfig c;
    c.delta = delta;
    c.epsilon = epsilon;
    c.agents = agents;
    if (!gamma.empty()) c.gamma = GrowthThreshold::parse(gamma);
    c.gamma1 = gamma1;
    if (!gamma2.empty()) c.gamma2 = GrowthThreshold::parse(gamma2);
    c.lambda = lambda;
    c.arm_select = arm_select == "greedy" ? ArmSelect::kGreedy : ArmSelect::kLp;
    c.greedy_sense = greedy_sense == "max" ? GreedySense::kMax : GreedySense::kMin;
    c.activation = activation == "round-robin" ? Activation::kRoundRobin : Activation::kUniform;
    c.max_rounds = max_rounds;
    c.audit = audit_from_env();
    return c;
  }
};

double dataset_min_gap(const AnyInstance& inst) {
  return std::visit(
      [](const auto& i) {
        double g = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < i.arms(); ++k) {
          if (k != i.best_arm()) g = std::min(g, i.gap(k));
        }
        return g;
      },
      inst);
}

std::size_t dataset_best_arm(const AnyInstance& inst) {
  return std::visit([](const auto& i) { return i.best_arm(); }, inst);
}

AnyInstance generate(bool linear, std::size_t dim, std::size_t arms, double gap, double sigma,
                     std::uint64_t seed) {
  Rng rng(seed, Rng::Stream::kInstance);
  if (linear) return gen_gap_instance_linear(dim, arms, gap, sigma, rng);
  return gen_gap_instance_mab(arms, gap, sigma, rng);
}

void print_summary(const std::vector<ExperimentRow>& rows, std::ostream& out) {
  struct Acc {
    std::uint64_t n = 0, terminated = 0, correct = 0;
    double tau = 0, comm = 0, sw = 0;
  };
  std::vector<std::string> order;
  std::map<std::string, Acc> acc;
  for (const auto& r : rows) {
    const std::string key = r.algo + " " + r.instance;
    if (!acc.count(key)) order.push_back(key);
    auto& a = acc[key];
    ++a.n;
    a.terminated += r.result.terminated;
    a.correct += r.result.correct;
    a.tau += static_cast<double>(r.result.tau);
    a.comm += static_cast<double>(r.result.comm_cost);
    a.sw += static_cast<double>(r.result.switch_cost);
  }
  for (const auto& key : order) {
    const auto& a = acc[key];
    const double n = static_cast<double>(a.n);
    out << key << ": runs=" << a.n << " mean_tau=" << fmt(a.tau / n)
        << " mean_comm_cost=" << fmt(a.comm / n) << " mean_switch_cost=" << fmt(a.sw / n)
        << " correct=" << fmt(static_cast<double>(a.correct) / n)
        << " terminated=" << fmt(static_cast<double>(a.terminated) / n) << '\n';
  }
}

int cmd_gen(const std::string& type, std::size_t arms, std::size_t dim, double gap, double sigma,
            std::uint64_t seed, const std::string& out_path, std::ostream& out) {
  const AnyInstance inst = generate(type == "linear", dim, arms, gap, sigma, seed);
  if (out_path.empty()) {
    out << to_json(inst) << '\n';
  } else {
    save_instance(out_path, inst);
  }
  out << "best_arm=" << dataset_best_arm(inst) << " min_gap=" << fmt(dataset_min_gap(inst), 17)
      << '\n';
  return kExitOk;
}

int cmd_bounds(const std::string& path, const ConfigFlags& flags, std::uint64_t tau,
               std::ostream& out) {
  const AnyInstance inst = load_instance(path);
  const RunConfig cfg = flags.to_config();
  nlohmann::ordered_json doc;
  const TheoryReport rep = std::visit(
      [&](const auto& i) { return compute_theory_diagnostics(i, cfg, tau); }, inst);
  doc["type"] = std::holds_alternative<MabInstance>(inst) ? "mab" : "linear";
  doc["epsilon"] = cfg.epsilon;
  if (rep.infinite) {
    doc["complexity"] = "+inf";
  } else {
    doc["complexity"] = rep.complexity;
  }
  doc["best_arm"] = rep.best_arm;
  doc["gaps"] = rep.gaps;
  doc["tau"] = rep.tau;
  doc["comm_bound"] = rep.comm_bound;
  out << doc.dump(2) << '\n';
  return kExitOk;
}

struct RunFlags {
  std::string algo;
  std::string instance;
  std::string sweep;
  std::string out_path;
  std::size_t arms = 5;
  std::size_t dim = 5;
  double sigma = 0.3;
  std::uint64_t gen_seed = 0;
  std::uint64_t reps = 1;
  std::uint64_t seed_base = 0;
  std::uint64_t episode_len = 100;
  unsigned jobs = 1;
  bool no_timing = false;
};

int cmd_run(const RunFlags& f, const ConfigFlags& flags, std::ostream& out, std::ostream& err) {
  ExperimentSpec spec;
  spec.algo = parse_algo(f.algo);
  spec.config = flags.to_config();
  spec.episode_len = f.episode_len;
  spec.reps = f.reps;
  spec.seed_base = f.seed_base;
  spec.jobs = std::max(1u, f.jobs);
  if (f.reps < 1) throw ParameterError("--reps must be at least 1");

  if (!f.sweep.empty()) {
    for (double gap : parse_sweep(f.sweep)) {
      spec.instances.push_back({"gap=" + format_label_number(gap),
                                generate(needs_linear(spec.algo), f.dim, f.arms, gap, f.sigma,
                                         f.gen_seed)});
    }
  } else if (!f.instance.empty()) {
    spec.instances.push_back({f.instance, load_instance(f.instance)});
  } else {
    throw ParameterError("run needs --instance or --gap-sweep");
  }

  if (spec.config.lambda && needs_linear(spec.algo)) {
    for (const auto& li : spec.instances) {
      const auto& lin = std::get<LinearInstance>(li.instance);
      const std::size_t agents = spec.algo == Algo::kLingapeSingle ? 1 : spec.config.agents;
      RunConfig probe = spec.config;
      probe.agents = agents;
      if (resolve(probe, lin.arms(), lin.sigma).lambda_exceeds_cap) {
        err << "warning: lambda " << *spec.config.lambda << " exceeds the confidence-bound cap "
            << fmt(lambda_cap(lin.sigma, probe.gamma1.value_or(1.0 / double(agents * agents)),
                              agents, spec.config.delta))
            << " for " << li.label << '\n';
      }
    }
  }

  const bool fresh = !std::filesystem::exists(f.out_path) || std::filesystem::is_empty(f.out_path);
  if (!fresh) {
    std::ifstream in(f.out_path);
    std::string first;
    std::getline(in, first);
    if (first != csv_header()) throw ParameterError("existing CSV has a different header");
  }

  const auto rows = run_experiment(spec);

  std::ofstream csv(f.out_path, std::ios::binary | std::ios::app);
  if (!csv) {
    err << "cannot open " << f.out_path << " for writing\n";
    return kExitFailure;
  }
  if (fresh) csv << csv_header() << '\n';
  for (const auto& r : rows) csv << csv_row(r, !f.no_timing) << '\n';
  print_summary(rows, out);
  return kExitOk;
}

}  // namespace

Algo parse_algo(const std::string& name) {
  const auto it = algo_table().find(name);
  if (it == algo_table().end()) throw ParameterError("unknown algorithm '" + name + "'");
  return it->second;
}

std::string algo_name(Algo algo) {
  for (const auto& [name, a] : algo_table()) {
    if (a == algo) return name;
  }
  return "unknown";
}

bool needs_linear(Algo algo) {
  return algo == Algo::kFalinpe || algo == Algo::kLingapeSingle || algo == Algo::kLingapeSync;
}

std::string csv_header() {
  return "algo,instance,seed,tau,comm_cost,init_comm,switch_cost,correct,best_arm_true,"
         "best_arm_est,terminated,runtime_ms";
}

std::string csv_row(const ExperimentRow& row, bool timing) {
  const auto& r = row.result;
  std::ostringstream s;
  s << row.algo << ',' << row.instance << ',' << row.seed << ',' << r.tau << ',' << r.comm_cost
    << ',' << r.init_comm << ',' << r.switch_cost << ',' << (r.correct ? 1 : 0) << ','
    << r.best_arm_true << ',' << r.best_arm_est << ',' << (r.terminated ? 1 : 0) << ','
    << std::fixed << std::setprecision(3) << (timing ? row.runtime_ms : 0.0);
  return s.str();
}

std::vector<double> parse_sweep(const std::string& text) {
  double start = 0, stop = 0, step = 0;
  char c1 = 0, c2 = 0;
  std::istringstream in(text);
  if (!(in >> start >> c1 >> stop >> c2 >> step) || c1 != ':' || c2 != ':' || !in.eof() ||
      !(step > 0.0) || stop < start) {
    throw ParameterError("sweep must look like start:stop:step with step > 0");
  }
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
  for (long i = 0; i <= n; ++i) out.push_back(start + static_cast<double>(i) * step);
  return out;
}

RunResult run_one(Algo algo, const AnyInstance& instance, const RunConfig& config,
                  std::uint64_t episode_len) {
  if (needs_linear(algo) != std::holds_alternative<LinearInstance>(instance)) {
    throw ParameterError("algorithm " + algo_name(algo) + " does not accept this instance type");
  }
  switch (algo) {
    case Algo::kFamabpe:
      return run_famabpe(std::get<MabInstance>(instance), config);
    case Algo::kFalinpe:
      return run_falinpe(std::get<LinearInstance>(instance), config);
    case Algo::kUgapecSingle:
      return run_single_agent(std::get<MabInstance>(instance), config);
    case Algo::kLingapeSingle:
      return run_single_agent(std::get<LinearInstance>(instance), config);
    case Algo::kUgapecSync:
      return run_synchronous(std::get<MabInstance>(instance), SyncConfig{config, episode_len});
    case Algo::kLingapeSync:
      return run_synchronous(std::get<LinearInstance>(instance), SyncConfig{config, episode_len});
  }
  throw ParameterError("unknown algorithm");
}

std::vector<ExperimentRow> run_experiment(const ExperimentSpec& spec) {
  for (const auto& li : spec.instances) {
    if (needs_linear(spec.algo) != std::holds_alternative<LinearInstance>(li.instance)) {
      throw ParameterError("algorithm " + algo_name(spec.algo) + " does not accept instance " +
                           li.label);
    }
  }
  const std::size_t total_jobs = spec.instances.size() * spec.reps;
  std::vector<ExperimentRow> rows(total_jobs);
  std::vector<std::exception_ptr> errors(total_jobs);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t idx = next++; idx < total_jobs; idx = next++) {
      const auto& li = spec.instances[idx / spec.reps];
      auto& row = rows[idx];
      row.algo = algo_name(spec.algo);
      row.instance = li.label;
      row.seed = spec.seed_base + idx % spec.reps;
      RunConfig cfg = spec.config;
      cfg.seed = row.seed;
      try {
        const auto start = std::chrono::steady_clock::now();
        row.result = run_one(spec.algo, li.instance, cfg, spec.episode_len);
        row.runtime_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - start)
                             .count();
      } catch (...) {
        errors[idx] = std::current_exception();
      }
    }
  };

  const unsigned threads = std::min<std::size_t>(std::max(1u, spec.jobs), total_jobs);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Federated asynchronous pure-exploration bandit simulator", "fedpex"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "Generate a bandit instance with a guaranteed gap");
  std::string gen_type = "mab";
  std::size_t gen_k = 5, gen_d = 5;
  double gen_gap = 0.3, gen_sigma = 0.3;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--type", gen_type, "Instance type")->check(CLI::IsMember({"mab", "linear"}));
  gen->add_option("--k", gen_k, "Number of arms");
  gen->add_option("--d", gen_d, "Context dimension (linear)");
  gen->add_option("--gap", gen_gap, "Minimum reward gap")->required();
  gen->add_option("--sigma", gen_sigma, "Noise scale");
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("--out", gen_out, "Output path (stdout when omitted)");

  auto* run_cmd = app.add_subcommand("run", "Run repeated experiments and append CSV rows");
  RunFlags rf;
  ConfigFlags run_cfg;
  run_cmd->add_option("--algo", rf.algo, "famabpe | falinpe | ugapec-single | ugapec-sync | "
                                         "lingape-single | lingape-sync")
      ->required();
  run_cmd->add_option("--instance", rf.instance, "Instance JSON path");
  run_cmd->add_option("--gap-sweep", rf.sweep, "Generate one instance per gap, start:stop:step");
  run_cmd->add_option("--k", rf.arms, "Arms for generated instances");
  run_cmd->add_option("--d", rf.dim, "Dimension for generated instances");
  run_cmd->add_option("--sigma", rf.sigma, "Noise scale for generated instances");
  run_cmd->add_option("--gen-seed", rf.gen_seed, "Seed for generated instances");
  run_cmd->add_option("--reps", rf.reps, "Repetitions per instance");
  run_cmd->add_option("--seed-base", rf.seed_base, "First run seed");
  run_cmd->add_option("--episode-len", rf.episode_len, "Global rounds between synchronizations")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--jobs", rf.jobs, "Parallel repetitions");
  run_cmd->add_option("--out", rf.out_path, "Results CSV (appended)")->required();
  run_cmd->add_flag("--no-timing", rf.no_timing, "Write runtime_ms as 0 for reproducible files");
  run_cfg.attach(*run_cmd);

  auto* bounds = app.add_subcommand("bounds", "Problem complexity and communication bound");
  std::string bounds_instance;
  std::uint64_t bounds_tau = 10000;
  ConfigFlags bounds_cfg;
  bounds->add_option("--instance", bounds_instance, "Instance JSON path")->required();
  bounds->add_option("--tau", bounds_tau, "Sample count for the communication bound");
  bounds_cfg.attach(*bounds);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) return cmd_gen(gen_type, gen_k, gen_d, gen_gap, gen_sigma, gen_seed, gen_out, out);
    if (*run_cmd) return cmd_run(rf, run_cfg, out, err);
    if (*bounds) return cmd_bounds(bounds_instance, bounds_cfg, bounds_tau, out);
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IndexError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvariantViolation& e) {
    err << "invariant violation: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace fedpex::cli
