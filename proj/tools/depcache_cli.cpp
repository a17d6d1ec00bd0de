#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "depcache/depcache.hpp"

namespace {

using namespace depcache;

// Writes to `path`, or stdout when empty or "-".
template <typename Fn>
void emit(const std::string& path, Fn&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) fail(ErrorCode::ConfigError, "cannot open " + path + " for writing");
  std::ostringstream buffer;
  write(buffer);
  out << buffer.str();
  if (!out) fail(ErrorCode::ConfigError, "write to " + path + " failed");
}

struct GenDagArgs {
  std::string type = "tree";
  std::size_t height = 10;
  std::string orientation = "ancestors";
  std::size_t k = 8;
  std::size_t ell = 4;
  std::size_t n = 10;
  double p = 0.2;
  std::uint64_t seed = 1;
  std::string out;
};

void gen_dag(const GenDagArgs& a) {
  DependencyDag dag;
  if (a.type == "tree") {
    dag = gen_balanced_tree(a.height, a.orientation == "subtree" ? TreeOrientation::NodeDependsOnSubtree
                                                                 : TreeOrientation::ChildDependsOnAncestors);
  } else if (a.type == "lower-bound") {
    dag = gen_lower_bound_instance(a.k, a.ell).dag;
  } else {
    RandomSource rng(a.seed);
    dag = random_dag(a.n, a.p, rng);
  }
  emit(a.out, [&](std::ostream& os) { write_dag(os, dag); });
}

struct GenTraceArgs {
  std::string workload = "zipf";
  std::string dag;
  std::size_t height = 10;
  std::string orientation = "ancestors";
  double a = 4.0;
  std::string reading = "per-node";
  double p = 10.0 / 1024.0;
  std::size_t len = 5000;
  std::size_t k = 8;
  std::size_t ell = 4;
  std::size_t subsequences = 200;
  std::uint64_t seed = 1;
  std::string out;
};

void gen_trace(const GenTraceArgs& a) {
  Trace trace;
  const auto orient = a.orientation == "subtree" ? TreeOrientation::NodeDependsOnSubtree
                                                 : TreeOrientation::ChildDependsOnAncestors;
  if (a.workload == "zipf") {
    const auto tree = gen_balanced_tree(a.height, orient);
    trace = gen_zipf_trace(tree, a.height, a.a, a.len, a.k, a.seed,
                           a.reading == "per-level" ? ZipfReading::PerLevel : ZipfReading::PerNode);
  } else if (a.workload == "geometric") {
    const auto tree = gen_balanced_tree(a.height, orient);
    trace = gen_geometric_trace(tree, a.height, a.p, a.len, a.k, a.seed);
  } else if (a.workload == "lower-bound") {
    trace = gen_lower_bound_trace(gen_lower_bound_instance(a.k, a.ell), a.subsequences, a.seed);
  } else {
    if (a.dag.empty()) fail(ErrorCode::ConfigError, "uniform traces need --dag");
    const auto dag = load_dag(a.dag);
    RandomSource rng(a.seed);
    trace.requests = random_trace(dag, a.k, a.len, rng);
    trace.generator = "uniform";
    trace.seed = a.seed;
    trace.params = {{"k", std::to_string(a.k)}};
  }
  emit(a.out, [&](std::ostream& os) { write_trace(os, trace); });
}

struct RunArgs {
  std::string config;
  std::vector<std::string> algs;
  std::vector<std::size_t> ks;
  std::string dag;
  std::string trace;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  bool oracle = false;
  std::string csv;
  std::vector<std::string> set;
};

void run(const RunArgs& a) {
  ExperimentConfig cfg;
  if (!a.config.empty()) {
    std::ifstream in(a.config);
    if (!in) fail(ErrorCode::ConfigError, "cannot open config " + a.config);
    cfg = parse_config(in);
  }
  for (const auto& entry : a.set) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos) fail(ErrorCode::ConfigError, "--set expects key=value, got '" + entry + "'");
    apply_config_entry(cfg, entry.substr(0, eq), entry.substr(eq + 1));
  }
  if (!a.algs.empty()) cfg.policies = a.algs;
  if (!a.ks.empty()) cfg.ks = a.ks;
  if (!a.dag.empty()) apply_config_entry(cfg, "dag", a.dag);
  if (!a.trace.empty()) apply_config_entry(cfg, "trace", a.trace);
  if (a.seed) cfg.base_seed = *a.seed;
  if (a.reps) cfg.repetitions = *a.reps;
  // A single file trace without a config defaults to one trial.
  if (!a.trace.empty() && !a.reps && a.config.empty()) cfg.repetitions = 1;
  if (a.oracle) cfg.oracle = true;
  // Rows are computed in full before anything is written.
  const auto rows = run_experiment(cfg);
  const std::string path = a.csv.empty() ? cfg.output : a.csv;
  emit(path, [&](std::ostream& os) { write_csv(os, rows); });
}

struct OptArgs {
  std::string dag;
  std::string trace;
  std::size_t k = 1;
  bool bypass = false;
  std::size_t budget = kDefaultStateBudget;
};

void opt(const OptArgs& a) {
  const auto dag = load_dag(a.dag);
  const auto trace = load_trace(a.trace);
  validate_trace(dag, trace.requests, a.k);
  const OptOracle oracle(dag, a.k, a.budget);
  std::cout << (a.bypass ? oracle.cost_with_bypass(trace.requests) : oracle.cost(trace.requests)) << '\n';
}

int run_verify(const std::string& suite, std::size_t trials) {
  const std::map<std::string, std::vector<std::string>> groups{
      {"all", {"feasibility", "det-ratio", "bucketing-ratio", "bypass-ratio", "lower-bound", "random-mark", "antichain"}},
      {"ratio-bounds", {"det-ratio", "bucketing-ratio", "bypass-ratio"}},
  };
  std::vector<std::string> wanted{suite};
  if (auto it = groups.find(suite); it != groups.end()) wanted = it->second;
  const auto available = verify::suites();
  bool all_passed = true;
  for (const auto& name : wanted) {
    auto it = std::find_if(available.begin(), available.end(), [&](const verify::Suite& s) { return s.name == name; });
    if (it == available.end()) fail(ErrorCode::ConfigError, "unknown suite '" + name + "'");
    const auto r = it->run(trials);
    all_passed = all_passed && r.passed;
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.summary << " (" << std::fixed
              << std::setprecision(1) << r.seconds << "s)" << std::defaultfloat << '\n';
  }
  return all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator for online caching with dependencies"};
  app.require_subcommand(1);

  GenDagArgs dag_args;
  auto* dag_cmd = app.add_subcommand("gen-dag", "Generate a dependency DAG");
  dag_cmd->add_option("--type", dag_args.type, "tree, lower-bound or random")
      ->check(CLI::IsMember({"tree", "lower-bound", "random"}));
  dag_cmd->add_option("--height", dag_args.height, "Tree height");
  dag_cmd->add_option("--orientation", dag_args.orientation, "Tree edge direction")
      ->check(CLI::IsMember({"ancestors", "subtree"}));
  dag_cmd->add_option("--k", dag_args.k, "Cache size for the lower-bound instance");
  dag_cmd->add_option("--ell", dag_args.ell, "Antichain size for the lower-bound instance");
  dag_cmd->add_option("--n", dag_args.n, "Item count for random DAGs");
  dag_cmd->add_option("--p", dag_args.p, "Edge probability for random DAGs");
  dag_cmd->add_option("--seed", dag_args.seed, "Random seed");
  dag_cmd->add_option("--out,-o", dag_args.out, "Output file (default stdout)");

  GenTraceArgs trace_args;
  auto* trace_cmd = app.add_subcommand("gen-trace", "Generate a request trace");
  trace_cmd->add_option("--workload", trace_args.workload, "zipf, geometric, lower-bound or uniform")
      ->check(CLI::IsMember({"zipf", "geometric", "lower-bound", "uniform"}));
  trace_cmd->add_option("--dag", trace_args.dag, "DAG file for uniform traces");
  trace_cmd->add_option("--height", trace_args.height, "Tree height");
  trace_cmd->add_option("--orientation", trace_args.orientation, "Tree edge direction")
      ->check(CLI::IsMember({"ancestors", "subtree"}));
  trace_cmd->add_option("--a", trace_args.a, "Zipf exponent");
  trace_cmd->add_option("--reading", trace_args.reading, "Zipf mass per node or per level")
      ->check(CLI::IsMember({"per-node", "per-level"}));
  trace_cmd->add_option("--p", trace_args.p, "Geometric parameter");
  trace_cmd->add_option("--len", trace_args.len, "Trace length");
  trace_cmd->add_option("--k", trace_args.k, "Cache size (requests with |T(v)| > k are pruned)");
  trace_cmd->add_option("--ell", trace_args.ell, "Antichain size for the lower-bound instance");
  trace_cmd->add_option("--subsequences", trace_args.subsequences, "Adversarial subsequences");
  trace_cmd->add_option("--seed", trace_args.seed, "Random seed");
  trace_cmd->add_option("--out,-o", trace_args.out, "Output file (default stdout)");

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Replay traces through policies and write CSV rows");
  run_cmd->add_option("--config", run_args.config, "key=value config file");
  run_cmd->add_option("--set", run_args.set, "Extra key=value config entries");
  run_cmd->add_option("--alg", run_args.algs, "Policies")->delimiter(',');
  run_cmd->add_option("--k", run_args.ks, "Cache sizes")->delimiter(',');
  run_cmd->add_option("--dag", run_args.dag, "DAG file");
  run_cmd->add_option("--trace", run_args.trace, "Trace file");
  run_cmd->add_option("--seed", run_args.seed, "Base seed");
  run_cmd->add_option("--reps", run_args.reps, "Repetitions");
  run_cmd->add_flag("--oracle", run_args.oracle, "Compute the offline optimum");
  run_cmd->add_option("--csv", run_args.csv, "CSV output file (default stdout)");

  OptArgs opt_args;
  auto* opt_cmd = app.add_subcommand("opt", "Print the offline optimum cost of a trace");
  opt_cmd->add_option("--dag", opt_args.dag, "DAG file")->required();
  opt_cmd->add_option("--trace", opt_args.trace, "Trace file")->required();
  opt_cmd->add_option("--k", opt_args.k, "Cache size")->required();
  opt_cmd->add_flag("--bypass", opt_args.bypass, "Allow bypassing at cost 1");
  opt_cmd->add_option("--budget", opt_args.budget, "Maximum number of cache configurations");

  std::string suite = "all";
  std::size_t trials = 0;
  auto* verify_cmd = app.add_subcommand("verify", "Run the statistical bound suites");
  verify_cmd->add_option("--suite", suite, "Suite name, ratio-bounds or all");
  verify_cmd->add_option("--trials", trials, "Trials per suite (0 keeps each default)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*dag_cmd) gen_dag(dag_args);
    if (*trace_cmd) gen_trace(trace_args);
    if (*run_cmd) run(run_args);
    if (*opt_cmd) opt(opt_args);
    if (*verify_cmd) return run_verify(suite, trials);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
