#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "depcache/baselines.hpp"
#include "depcache/bucketing.hpp"
#include "depcache/bypass.hpp"
#include "depcache/dag.hpp"
#include "depcache/error.hpp"
#include "depcache/opt_oracle.hpp"
#include "depcache/policy.hpp"
#include "depcache/recursive_lru.hpp"
#include "depcache/workload.hpp"

namespace depcache {

inline const std::vector<std::string>& policy_names() {
  static const std::vector<std::string> names{"bucketing", "bypass", "det", "lru", "random-mark"};
  return names;
}

inline bool uses_bypass_model(const std::string& policy) { return policy == "bypass"; }

// `ell` is only consulted by the bypass policy; pass it to avoid recomputing
// the antichain for every trial.
inline std::unique_ptr<OnlinePolicy> make_policy(const std::string& name, const DependencyDag& dag, std::size_t k,
                                                 std::uint64_t seed, std::optional<std::size_t> ell = {}) {
  if (name == "bucketing") return std::make_unique<Bucketing>(dag, k, seed);
  if (name == "bypass") return std::make_unique<BucketingBypass>(dag, k, seed, ell);
  if (name == "det") return std::make_unique<RecursiveLru>(dag, k);
  if (name == "lru") return std::make_unique<Lru>(dag, k);
  if (name == "random-mark") return std::make_unique<RandomMark>(dag, k, seed);
  fail(ErrorCode::ConfigError, "unknown policy '" + name + "'");
}

// splitmix64 finalizer; decorrelates the policy's stream from the trace's.
inline std::uint64_t derive_seed(std::uint64_t seed) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct DagSource {
  enum class Kind { File, Tree, LowerBound };
  Kind kind = Kind::Tree;
  std::string path;
  std::size_t tree_height = 10;
  TreeOrientation orientation = TreeOrientation::ChildDependsOnAncestors;
  std::size_t lb_k = 8;
  std::size_t lb_ell = 4;
};

struct TraceSource {
  enum class Kind { File, Zipf, Geometric, LowerBound };
  Kind kind = Kind::Zipf;
  std::string path;
  double zipf_a = 4.0;
  ZipfReading zipf_reading = ZipfReading::PerNode;
  double geometric_p = 10.0 / 1024.0;
  std::size_t length = 5000;
  std::size_t lb_subsequences = 200;
};

struct ExperimentConfig {
  DagSource dag;
  TraceSource trace;
  std::vector<std::string> policies{"bypass"};
  std::vector<std::size_t> ks{8};
  std::size_t repetitions = 10;
  std::uint64_t base_seed = 1;
  bool oracle = false;
  std::size_t oracle_budget = kDefaultStateBudget;
  std::string output;

  void validate() const {
    if (repetitions < 1) fail(ErrorCode::ConfigError, "repetitions must be >= 1");
    if (policies.empty()) fail(ErrorCode::ConfigError, "at least one policy is required");
    if (ks.empty()) fail(ErrorCode::ConfigError, "at least one cache size is required");
    for (const auto& p : policies) {
      if (std::find(policy_names().begin(), policy_names().end(), p) == policy_names().end()) {
        fail(ErrorCode::ConfigError, "unknown policy '" + p + "'");
      }
    }
    for (std::size_t k : ks) {
      if (k == 0) fail(ErrorCode::ConfigError, "cache sizes must be positive");
    }
    if (dag.kind == DagSource::Kind::File && dag.path.empty()) fail(ErrorCode::ConfigError, "dag file path missing");
    if (trace.kind == TraceSource::Kind::File && trace.path.empty()) fail(ErrorCode::ConfigError, "trace file path missing");
    if (trace.kind == TraceSource::Kind::LowerBound && dag.kind != DagSource::Kind::LowerBound) {
      fail(ErrorCode::ConfigError, "lower-bound traces need the lower-bound instance");
    }
    if ((trace.kind == TraceSource::Kind::Zipf || trace.kind == TraceSource::Kind::Geometric) &&
        dag.kind != DagSource::Kind::Tree) {
      fail(ErrorCode::ConfigError, "zipf/geometric workloads need a generated tree");
    }
  }
};

struct ResultRow {
  std::string policy;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::size_t trace_len = 0;
  std::size_t total_cost = 0;
  double cost_per_request = 0.0;
  std::size_t phases = 0;
  std::size_t clean = 0;
  std::size_t stale = 0;
  std::size_t bypasses = 0;
  std::optional<std::size_t> opt_cost;
  std::optional<double> ratio;
};

inline constexpr const char* kCsvHeader =
    "policy,k,seed,trace_len,total_cost,cost_per_request,phases,clean,stale,bypasses,opt_cost,ratio";

inline void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.policy << ',' << r.k << ',' << r.seed << ',' << r.trace_len << ',' << r.total_cost << ',' << std::fixed
        << std::setprecision(6) << r.cost_per_request << ',' << r.phases << ',' << r.clean << ',' << r.stale << ','
        << r.bypasses << ',';
    if (r.opt_cost) out << *r.opt_cost;
    out << ',';
    if (r.ratio) out << std::setprecision(6) << *r.ratio;
    out << '\n';
  }
  out << std::defaultfloat;
}

inline std::string to_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  write_csv(os, rows);
  return os.str();
}

struct Instance {
  DependencyDag dag;
  std::optional<LowerBoundInstance> lower_bound;
};

inline Instance load_instance(const DagSource& src) {
  switch (src.kind) {
    case DagSource::Kind::File: return {load_dag(src.path), std::nullopt};
    case DagSource::Kind::Tree: return {gen_balanced_tree(src.tree_height, src.orientation), std::nullopt};
    case DagSource::Kind::LowerBound: {
      auto lb = gen_lower_bound_instance(src.lb_k, src.lb_ell);
      DependencyDag dag = lb.dag;
      return {std::move(dag), std::move(lb)};
    }
  }
  fail(ErrorCode::ConfigError, "unknown dag source");
}

inline Trace make_trace(const ExperimentConfig& cfg, const Instance& inst, std::size_t k, std::uint64_t seed) {
  const auto& src = cfg.trace;
  switch (src.kind) {
    case TraceSource::Kind::File: return load_trace(src.path);
    case TraceSource::Kind::Zipf:
      return gen_zipf_trace(inst.dag, cfg.dag.tree_height, src.zipf_a, src.length, k, seed, src.zipf_reading);
    case TraceSource::Kind::Geometric:
      return gen_geometric_trace(inst.dag, cfg.dag.tree_height, src.geometric_p, src.length, k, seed);
    case TraceSource::Kind::LowerBound: return gen_lower_bound_trace(*inst.lower_bound, src.lb_subsequences, seed);
  }
  fail(ErrorCode::ConfigError, "unknown trace source");
}

// One row per (policy, k, repetition). Trial t uses seed base+t for the
// trace and a derived seed for the policy; every policy sees the same trace
// for a given (k, t). Rows come back ordered by (policy, k, seed).
inline std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const Instance inst = load_instance(cfg.dag);
  std::optional<std::size_t> ell;
  if (std::find(cfg.policies.begin(), cfg.policies.end(), "bypass") != cfg.policies.end() && !inst.dag.empty()) {
    ell = max_antichain_size(inst.dag);
  }
  std::optional<Trace> file_trace;
  if (cfg.trace.kind == TraceSource::Kind::File) file_trace = load_trace(cfg.trace.path);

  std::vector<std::vector<ResultRow>> per_policy(cfg.policies.size());
  for (std::size_t k : cfg.ks) {
    std::optional<OptOracle> oracle;
    if (cfg.oracle) oracle.emplace(inst.dag, k, cfg.oracle_budget);
    for (std::size_t t = 0; t < cfg.repetitions; ++t) {
      const std::uint64_t seed = cfg.base_seed + t;
      const Trace trace = file_trace ? *file_trace : make_trace(cfg, inst, k, seed);
      validate_trace(inst.dag, trace.requests, k);
      std::optional<std::size_t> opt_plain, opt_bypass;
      for (std::size_t p = 0; p < cfg.policies.size(); ++p) {
        const std::string& name = cfg.policies[p];
        auto policy = make_policy(name, inst.dag, k, derive_seed(seed), ell);
        std::size_t summed = 0;
        for (Item v : trace.requests) summed += policy->serve(v).cost;
        if (summed != policy->total_cost()) fail(ErrorCode::InternalError, "per-request costs do not sum to the total");
        const auto& st = policy->stats();
        ResultRow row;
        row.policy = name;
        row.k = k;
        row.seed = seed;
        row.trace_len = trace.size();
        row.total_cost = st.total_cost;
        row.cost_per_request = trace.size() ? static_cast<double>(st.total_cost) / static_cast<double>(trace.size()) : 0.0;
        row.phases = st.phases;
        row.clean = st.clean;
        row.stale = st.stale;
        row.bypasses = st.bypasses;
        if (oracle) {
          auto& slot = uses_bypass_model(name) ? opt_bypass : opt_plain;
          if (!slot) slot = uses_bypass_model(name) ? oracle->cost_with_bypass(trace.requests) : oracle->cost(trace.requests);
          row.opt_cost = *slot;
          if (*slot > 0) row.ratio = static_cast<double>(st.total_cost) / static_cast<double>(*slot);
        }
        per_policy[p].push_back(std::move(row));
      }
    }
  }
  std::vector<ResultRow> rows;
  for (auto& group : per_policy) {
    std::stable_sort(group.begin(), group.end(), [](const ResultRow& a, const ResultRow& b) {
      return std::pair(a.k, a.seed) < std::pair(b.k, b.seed);
    });
    rows.insert(rows.end(), group.begin(), group.end());
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Flat key=value config files.

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    part = trim(part);
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

inline std::size_t to_size(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    long long x = std::stoll(v, &used);
    if (used != v.size() || x < 0) throw std::invalid_argument(v);
    return static_cast<std::size_t>(x);
  } catch (const std::exception&) {
    fail(ErrorCode::ConfigError, "'" + key + "' expects a non-negative integer, got '" + v + "'");
  }
}

inline double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    fail(ErrorCode::ConfigError, "'" + key + "' expects a number, got '" + v + "'");
  }
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  fail(ErrorCode::ConfigError, "'" + key + "' expects a boolean, got '" + v + "'");
}

}  // namespace detail

inline void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  using detail::to_double;
  using detail::to_size;
  if (key == "dag") {
    cfg.dag.kind = DagSource::Kind::File;
    cfg.dag.path = value;
  } else if (key == "dag_source") {
    if (value == "file") cfg.dag.kind = DagSource::Kind::File;
    else if (value == "tree") cfg.dag.kind = DagSource::Kind::Tree;
    else if (value == "lower-bound") cfg.dag.kind = DagSource::Kind::LowerBound;
    else fail(ErrorCode::ConfigError, "dag_source must be file, tree or lower-bound");
  } else if (key == "tree_height") {
    cfg.dag.kind = DagSource::Kind::Tree;
    cfg.dag.tree_height = to_size(key, value);
  } else if (key == "tree_orientation") {
    if (value == "ancestors") cfg.dag.orientation = TreeOrientation::ChildDependsOnAncestors;
    else if (value == "subtree") cfg.dag.orientation = TreeOrientation::NodeDependsOnSubtree;
    else fail(ErrorCode::ConfigError, "tree_orientation must be ancestors or subtree");
  } else if (key == "lb_k") {
    cfg.dag.lb_k = to_size(key, value);
  } else if (key == "lb_l") {
    cfg.dag.lb_ell = to_size(key, value);
  } else if (key == "trace") {
    cfg.trace.kind = TraceSource::Kind::File;
    cfg.trace.path = value;
  } else if (key == "workload") {
    if (value == "file") cfg.trace.kind = TraceSource::Kind::File;
    else if (value == "zipf") cfg.trace.kind = TraceSource::Kind::Zipf;
    else if (value == "geometric") cfg.trace.kind = TraceSource::Kind::Geometric;
    else if (value == "lower-bound") cfg.trace.kind = TraceSource::Kind::LowerBound;
    else fail(ErrorCode::ConfigError, "workload must be file, zipf, geometric or lower-bound");
  } else if (key == "zipf_a") {
    cfg.trace.zipf_a = to_double(key, value);
  } else if (key == "zipf_reading") {
    if (value == "per-node") cfg.trace.zipf_reading = ZipfReading::PerNode;
    else if (value == "per-level") cfg.trace.zipf_reading = ZipfReading::PerLevel;
    else fail(ErrorCode::ConfigError, "zipf_reading must be per-node or per-level");
  } else if (key == "geometric_p") {
    cfg.trace.geometric_p = to_double(key, value);
  } else if (key == "trace_len") {
    cfg.trace.length = to_size(key, value);
  } else if (key == "lb_subsequences") {
    cfg.trace.lb_subsequences = to_size(key, value);
  } else if (key == "policies") {
    cfg.policies = detail::split_list(value);
  } else if (key == "k") {
    cfg.ks.clear();
    for (const auto& part : detail::split_list(value)) cfg.ks.push_back(to_size(key, part));
  } else if (key == "repetitions") {
    cfg.repetitions = to_size(key, value);
  } else if (key == "seed") {
    cfg.base_seed = to_size(key, value);
  } else if (key == "oracle") {
    cfg.oracle = detail::to_bool(key, value);
  } else if (key == "oracle_budget") {
    cfg.oracle_budget = to_size(key, value);
  } else if (key == "output") {
    cfg.output = value;
  } else {
    fail(ErrorCode::ConfigError, "unknown config key '" + key + "'");
  }
}

inline ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorCode::ConfigError, "line " + std::to_string(line_no) + ": expected key=value");
    apply_config_entry(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
  return cfg;
}

}  // namespace depcache
