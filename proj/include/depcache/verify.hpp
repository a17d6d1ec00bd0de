#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "depcache/baselines.hpp"
#include "depcache/bucketing.hpp"
#include "depcache/bypass.hpp"
#include "depcache/dag.hpp"
#include "depcache/opt_oracle.hpp"
#include "depcache/recursive_lru.hpp"
#include "depcache/workload.hpp"

// Randomized checks of the algorithms' guarantees against the exact
// offline optimum. Shared by the CLI `verify` subcommand and the
// acceptance suite.
namespace depcache::verify {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string summary;
  double seconds = 0.0;
};

namespace detail {

template <typename Body>
SuiteResult timed(std::string name, Body&& body) {
  const auto start = std::chrono::steady_clock::now();
  SuiteResult r;
  r.name = std::move(name);
  body(r);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

inline std::size_t uniform_in(RandomSource& rng, std::size_t lo, std::size_t hi) { return lo + rng.index(hi - lo + 1); }

}  // namespace detail

// A fixed random instance: DAG, cache size and request sequence.
struct SmallInstance {
  DependencyDag dag;
  std::size_t k = 1;
  std::vector<Item> trace;
  std::size_t ell = 1;
};

inline SmallInstance make_instance(std::uint64_t seed, std::size_t max_n, std::size_t max_k, std::size_t max_len,
                                   std::size_t min_len = 0) {
  RandomSource rng(seed);
  SmallInstance inst;
  const std::size_t n = detail::uniform_in(rng, 1, max_n);
  const double p = 0.05 + 0.35 * rng.unit();
  inst.dag = random_dag(n, p, rng);
  inst.k = detail::uniform_in(rng, 1, max_k);
  inst.trace = random_trace(inst.dag, inst.k, detail::uniform_in(rng, min_len, max_len), rng);
  inst.ell = max_antichain_size(inst.dag);
  return inst;
}

// Cache closure and capacity after every single fetch and eviction.
inline SuiteResult feasibility(std::size_t runs = 10'000, std::uint64_t seed = 1) {
  return detail::timed("feasibility", [&](SuiteResult& r) {
    std::size_t violations = 0, steps = 0;
    for (std::size_t i = 0; i < runs; ++i) {
      const auto inst = make_instance(seed * 1'000'003 + i, 20, 10, 200);
      Bucketing bucketing(inst.dag, inst.k, seed + i);
      BucketingBypass bypass(inst.dag, inst.k, seed + i, inst.ell);
      RecursiveLru det(inst.dag, inst.k);
      for (OnlinePolicy* policy : std::initializer_list<OnlinePolicy*>{&bucketing, &bypass, &det}) {
        policy->set_observer([&](const CacheState& c) {
          ++steps;
          if (!c.is_feasible(inst.dag)) ++violations;
        });
        for (Item v : inst.trace) {
          policy->serve(v);
          if (!policy->cache().contains(v) && policy == &det) ++violations;
        }
      }
      for (const BucketingCore* b : {static_cast<const BucketingCore*>(&bucketing), static_cast<const BucketingCore*>(&bypass)}) {
        if (!b->pool().satisfies_invariants(b->cache(), inst.dag)) ++violations;
      }
    }
    r.passed = violations == 0;
    r.summary = std::to_string(runs) + " instances, " + std::to_string(steps) + " intermediate states, " +
                std::to_string(violations) + " violations";
  });
}

// Recursive LRU never pays more than k times the optimum.
inline SuiteResult det_ratio(std::size_t instances = 2'000, std::uint64_t seed = 2) {
  return detail::timed("det-ratio", [&](SuiteResult& r) {
    std::size_t failures = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < instances; ++i) {
      const auto inst = make_instance(seed * 1'000'003 + i, 10, 5, 30, 1);
      RecursiveLru det(inst.dag, inst.k);
      const std::size_t alg = det.run(inst.trace);
      const std::size_t opt = opt_cost(inst.dag, inst.k, inst.trace);
      if (alg > inst.k * opt) ++failures;
      if (opt > 0) worst = std::max(worst, static_cast<double>(alg) / static_cast<double>(opt * inst.k));
    }
    r.passed = failures == 0;
    std::ostringstream os;
    os << instances << " instances, " << failures << " with cost > k*OPT, worst cost/(k*OPT) = " << worst;
    r.summary = os.str();
  });
}

inline std::vector<SmallInstance> fixed_instances(std::size_t count, std::uint64_t seed) {
  std::vector<SmallInstance> out;
  for (std::size_t i = 0; out.size() < count; ++i) {
    auto inst = make_instance(seed * 7'919 + i, 12, 6, 150, 150);
    if (inst.dag.size() < 4 || inst.k < 2) continue;
    out.push_back(std::move(inst));
  }
  return out;
}

inline constexpr double kStatisticalSlack = 0.05;

// Mean Bucketing cost within 2 H_min(k,l) of the optimum, up to 5%.
inline SuiteResult bucketing_ratio(std::size_t instances = 20, std::size_t seeds = 1'000, std::uint64_t seed = 3) {
  return detail::timed("bucketing-ratio", [&](SuiteResult& r) {
    std::size_t failures = 0;
    double worst = 0.0;
    for (const auto& inst : fixed_instances(instances, seed)) {
      const double opt = static_cast<double>(opt_cost(inst.dag, inst.k, inst.trace));
      double total = 0.0;
      for (std::size_t s = 0; s < seeds; ++s) {
        Bucketing alg(inst.dag, inst.k, seed * 100'000 + s);
        total += static_cast<double>(alg.run(inst.trace));
      }
      const double bound = 2.0 * harmonic(std::min(inst.k, inst.ell)) * opt;
      const double mean = total / static_cast<double>(seeds);
      if (mean > bound * (1.0 + kStatisticalSlack)) ++failures;
      worst = std::max(worst, mean / bound);
    }
    r.passed = failures == 0;
    std::ostringstream os;
    os << instances << " instances x " << seeds << " seeds, " << failures << " above bound, worst mean/bound = " << worst;
    r.summary = os.str();
  });
}

// Mean BucketingBypass cost within 6 sqrt(k H_min(k,l)) of the bypass
// optimum, and the per-phase shrink-bypass cap holding in every run.
inline SuiteResult bypass_ratio(std::size_t instances = 20, std::size_t seeds = 1'000, std::uint64_t seed = 4) {
  return detail::timed("bypass-ratio", [&](SuiteResult& r) {
    std::size_t failures = 0, cap_violations = 0;
    double worst = 0.0;
    for (const auto& inst : fixed_instances(instances, seed)) {
      const double opt = static_cast<double>(opt_cost_bypass(inst.dag, inst.k, inst.trace));
      const double cap = shrink_bypass_cap(inst.k, inst.ell);
      double total = 0.0;
      for (std::size_t s = 0; s < seeds; ++s) {
        BucketingBypass alg(inst.dag, inst.k, seed * 100'000 + s, inst.ell);
        total += static_cast<double>(alg.run(inst.trace));
        for (const auto& log : alg.phase_logs()) {
          if (static_cast<double>(log.shrink_bypasses) > cap) ++cap_violations;
        }
      }
      const double bound = 6.0 * shrink_bypass_cap(inst.k, inst.ell) * opt;
      const double mean = total / static_cast<double>(seeds);
      if (mean > bound * (1.0 + kStatisticalSlack)) ++failures;
      worst = std::max(worst, mean / bound);
    }
    r.passed = failures == 0 && cap_violations == 0;
    std::ostringstream os;
    os << instances << " instances x " << seeds << " seeds, " << failures << " above bound, worst mean/bound = " << worst
       << ", shrink-cap violations = " << cap_violations;
    r.summary = os.str();
  });
}

struct LowerBoundMeasurement {
  double per_phase_cost = 0.0;  // mean non-compulsory online cost per unit of optimum cost
  double opt_phases = 0.0;      // mean non-compulsory optimum cost, i.e. adversarial phases
};

// Both the online algorithm and the optimum must fetch every distinct item
// once; what remains of the optimum's cost is one fetch per adversarial
// phase, so the ratio of the remainders is the online cost per phase.
inline LowerBoundMeasurement measure_lower_bound(std::size_t k, std::size_t ell, std::size_t subsequences,
                                                 std::size_t seeds, std::uint64_t seed) {
  const auto inst = gen_lower_bound_instance(k, ell);
  const OptOracle oracle(inst.dag, k);
  double alg_total = 0.0, opt_total = 0.0;
  for (std::size_t s = 0; s < seeds; ++s) {
    const auto trace = gen_lower_bound_trace(inst, subsequences, seed * 100'000 + s);
    const std::set<Item> distinct(trace.requests.begin(), trace.requests.end());
    const auto opt = oracle.cost(trace.requests);
    Bucketing alg(inst.dag, k, seed * 100'000 + s + 1);
    const auto cost = alg.run(trace.requests);
    alg_total += static_cast<double>(cost - distinct.size());
    opt_total += static_cast<double>(opt - distinct.size());
  }
  return {alg_total / opt_total, opt_total / static_cast<double>(seeds)};
}

inline SuiteResult lower_bound(std::size_t subsequences = 1'200, std::size_t seeds = 500, std::uint64_t seed = 5) {
  return detail::timed("lower-bound", [&](SuiteResult& r) {
    const double h4 = harmonic(4);
    const auto m = measure_lower_bound(8, 4, subsequences, seeds, seed);
    r.passed = m.opt_phases >= 200.0 && m.per_phase_cost >= 0.8 * h4 && m.per_phase_cost <= 2.1 * h4;
    std::ostringstream os;
    os << "k=8 l=4, " << seeds << " seeds, " << m.opt_phases << " phases/run, per-phase cost " << m.per_phase_cost
       << " in [" << 0.8 * h4 << ", " << 2.1 * h4 << "]";
    r.summary = os.str();
  });
}

// Edge-free universes: Bucketing and Random Mark with equal seeds evict
// the same items in the same order and change phase together.
inline SuiteResult random_mark_equivalence(std::size_t traces = 1'000, std::uint64_t seed = 6) {
  return detail::timed("random-mark", [&](SuiteResult& r) {
    std::size_t divergences = 0;
    for (std::size_t i = 0; i < traces; ++i) {
      RandomSource rng(seed * 1'000'003 + i);
      const std::size_t n = detail::uniform_in(rng, 1, 16);
      const std::size_t k = detail::uniform_in(rng, 1, 8);
      const auto dag = DependencyDag::edge_free(n);
      const auto trace = random_trace(dag, k, detail::uniform_in(rng, 1, 200), rng);
      Bucketing bucketing(dag, k, seed + i);
      RandomMark mark(dag, k, seed + i);
      for (Item v : trace) {
        const auto a = bucketing.serve(v);
        const auto b = mark.serve(v);
        if (a.evicted != b.evicted || a.fetched != b.fetched || a.phase_after != b.phase_after) {
          ++divergences;
          break;
        }
      }
    }
    r.passed = divergences == 0;
    r.summary = std::to_string(traces) + " traces, " + std::to_string(divergences) + " divergences";
  });
}

inline SuiteResult antichain(std::size_t dags = 200, std::uint64_t seed = 7) {
  return detail::timed("antichain", [&](SuiteResult& r) {
    std::size_t mismatches = 0;
    RandomSource rng(seed);
    for (std::size_t i = 0; i < dags; ++i) {
      const std::size_t n = detail::uniform_in(rng, 1, 12);
      const auto dag = random_dag(n, 0.5 * rng.unit(), rng);
      if (max_antichain_size(dag) != max_antichain_bruteforce(dag)) ++mismatches;
    }
    for (std::size_t n = 1; n <= 12; ++n) {
      if (max_antichain_size(DependencyDag::edge_free(n)) != n) ++mismatches;
      std::vector<Edge> chain;
      for (Item x = 1; x < n; ++x) chain.push_back({x, x - 1});
      if (max_antichain_size(DependencyDag::build(n, chain)) != 1) ++mismatches;
    }
    r.passed = mismatches == 0;
    r.summary = std::to_string(dags) + " random DAGs plus edge-free and chain cases, " + std::to_string(mismatches) + " mismatches";
  });
}

struct Suite {
  std::string name;
  std::function<SuiteResult(std::size_t trials)> run;  // trials == 0 keeps the default
};

inline std::vector<Suite> suites() {
  auto pick = [](std::size_t trials, std::size_t fallback) { return trials ? trials : fallback; };
  return {
      {"feasibility", [=](std::size_t t) { return feasibility(pick(t, 10'000)); }},
      {"det-ratio", [=](std::size_t t) { return det_ratio(pick(t, 2'000)); }},
      {"bucketing-ratio", [=](std::size_t t) { return bucketing_ratio(20, pick(t, 1'000)); }},
      {"bypass-ratio", [=](std::size_t t) { return bypass_ratio(20, pick(t, 1'000)); }},
      {"lower-bound", [=](std::size_t t) { return lower_bound(1'200, pick(t, 500)); }},
      {"random-mark", [=](std::size_t t) { return random_mark_equivalence(pick(t, 1'000)); }},
      {"antichain", [=](std::size_t t) { return antichain(pick(t, 200)); }},
  };
}

}  // namespace depcache::verify
