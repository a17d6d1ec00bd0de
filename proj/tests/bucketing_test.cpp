#include <gtest/gtest.h>

#include <map>

#include "support.hpp"

namespace depcache {
namespace {

using testing::chain_edges;
using testing::example_dag;
using testing::labels;
using testing::lbl;

std::vector<Item> ids(std::initializer_list<Item> ls) {
  std::vector<Item> out;
  for (Item l : ls) out.push_back(lbl(l));
  return out;
}

TEST(Bucketing, ChainFromEmptyCache) {
  const auto dag = DependencyDag::build(3, chain_edges(3));
  Bucketing alg(dag, 3, 1);
  const auto out = alg.serve(2);
  EXPECT_EQ(out.fetched, (std::vector<Item>{0, 1, 2}));
  EXPECT_EQ(out.fetch_clean, (std::vector<bool>{true, true, true}));
  EXPECT_EQ(out.cost, 3u);
  EXPECT_TRUE(out.evicted.empty());
}

TEST(Bucketing, HitCostsNothingAndMarks) {
  const auto dag = DependencyDag::edge_free(3);
  Bucketing alg(dag, 2, 1);
  alg.run(std::vector<Item>{0, 1});
  alg.serve(2);  // evicts one of 0 and 1, then the pool holds the other
  const Item survivor = alg.cache().contains(0) ? 0 : 1;
  ASSERT_EQ(alg.pool().size(), 1u);
  const auto out = alg.serve(survivor);
  EXPECT_EQ(out.cost, 0u);
  EXPECT_EQ(out.action, ServeAction::Hit);
  EXPECT_TRUE(alg.pool().empty());
}

// Labels 6, 7, 8 fill the k = 8 cache with labels 1..8. The request for 9
// then regenerates the pool to T(6), T(7), T(8); removing T(9) freezes T(6),
// so 7 and 8 are each evicted with probability one half.
TEST(Bucketing, ExampleEvictionIsUniformOverLiveBuckets) {
  const auto dag = example_dag();
  const auto warmup = ids({6, 7, 8});
  std::map<Item, int> evicted;
  constexpr int kSeeds = 4000;
  for (int seed = 0; seed < kSeeds; ++seed) {
    Bucketing alg(dag, 8, seed);
    alg.run(warmup);
    ASSERT_TRUE(alg.cache().full());
    const auto out = alg.serve(lbl(9));
    ASSERT_EQ(out.evicted.size(), 1u);
    EXPECT_EQ(out.cost, 1u);
    EXPECT_EQ(out.fetched, ids({9}));
    ++evicted[out.evicted[0] + 1];
  }
  ASSERT_EQ(evicted.size(), 2u);
  const double sigma = std::sqrt(kSeeds * 0.25);
  EXPECT_LT(std::abs(evicted[7] - kSeeds / 2.0), 3 * sigma);
  EXPECT_LT(std::abs(evicted[8] - kSeeds / 2.0), 3 * sigma);
}

TEST(Bucketing, EmptyTrace) {
  const auto dag = example_dag();
  Bucketing alg(dag, 4, 1);
  EXPECT_EQ(alg.run(std::vector<Item>{}), 0u);
}

TEST(Bucketing, DistinctItemsUpToCapacityUseOnePhase) {
  const auto dag = DependencyDag::edge_free(5);
  Bucketing alg(dag, 5, 1);
  EXPECT_EQ(alg.run(std::vector<Item>{0, 1, 2, 3, 4}), 5u);
  ASSERT_EQ(alg.phase_logs().size(), 1u);
  EXPECT_EQ(alg.phase_logs()[0].clean, 5u);
  EXPECT_EQ(alg.phase_logs()[0].stale, 0u);
  EXPECT_EQ(alg.stats().phases, 1u);
}

TEST(Bucketing, RejectsOversizedRequest) {
  const auto dag = DependencyDag::build(3, chain_edges(3));
  Bucketing alg(dag, 2, 1);
  try {
    alg.serve(2);
    FAIL() << "expected RequestTooLarge";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RequestTooLarge);
  }
}

TEST(Bucketing, SameSeedSameOutcomes) {
  RandomSource rng(8);
  const auto dag = random_dag(14, 0.2, rng);
  const auto trace = random_trace(dag, 5, 300, rng);
  Bucketing a(dag, 5, 42), b(dag, 5, 42);
  for (Item v : trace) {
    const auto x = a.serve(v), y = b.serve(v);
    EXPECT_EQ(x.fetched, y.fetched);
    EXPECT_EQ(x.evicted, y.evicted);
  }
}

struct PropertyCounts {
  std::size_t runs = 0;
  std::size_t completed_phases = 0;
};

// Accounting identities and structural invariants on random instances.
TEST(BucketingProperties, InvariantsOnRandomInstances) {
  PropertyCounts counts;
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    RandomSource rng(seed);
    const auto dag = random_dag(2 + rng.index(14), 0.25 * rng.unit(), rng);
    const std::size_t k = 1 + rng.index(6);
    const auto trace = random_trace(dag, k, 150, rng);
    Bucketing alg(dag, k, seed);
    std::size_t violations = 0;
    alg.set_observer([&](const CacheState& c) { violations += !c.is_feasible(dag); });
    std::size_t summed = 0;
    for (Item v : trace) {
      const auto out = alg.serve(v);
      summed += out.cost;
      EXPECT_TRUE(alg.cache().contains_all(dag.descendants(v)));
      EXPECT_TRUE(alg.pool().satisfies_invariants(alg.cache(), dag));
    }
    EXPECT_EQ(violations, 0u);
    EXPECT_EQ(summed, alg.total_cost());
    std::size_t clean = 0, stale = 0;
    for (const auto& log : alg.phase_logs()) {
      clean += log.clean;
      stale += log.stale;
      EXPECT_LE(log.freeze_order.size(), log.initial_buckets);
      std::size_t frag_evictions = 0, frag_clean = 0, frag_stale = 0;
      for (std::size_t i = 0; i < log.fragments.size(); ++i) {
        const auto& f = log.fragments[i];
        // Each eviction is followed by a fetch charged to the same fragment.
        EXPECT_LE(f.evictions, f.clean + f.stale);
        frag_evictions += f.evictions;
        frag_clean += f.clean;
        frag_stale += f.stale;
      }
      EXPECT_EQ(frag_evictions, log.evictions);
      EXPECT_EQ(frag_clean, log.clean);
      EXPECT_EQ(frag_stale, log.stale);
      std::size_t attributed = 0;
      for (std::size_t s : log.stale_by_bucket) attributed += s;
      EXPECT_EQ(attributed, log.stale);
      if (log.completed) {
        ++counts.completed_phases;
        // A completed phase froze every bucket it started with.
        EXPECT_EQ(log.freeze_order.size(), log.initial_buckets);
      }
    }
    EXPECT_EQ(clean + stale, alg.total_cost());
    EXPECT_EQ(alg.stats().clean, clean);
    ++counts.runs;
  }
  EXPECT_GT(counts.completed_phases, 100u);
}

// Without dependencies, the bucket evicting a stale item's earlier copy
// is always frozen before the phase ends, so the last bucket has none.
TEST(BucketingProperties, LastBucketHasNoStaleFetchesWithoutEdges) {
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    RandomSource rng(seed);
    const auto dag = DependencyDag::edge_free(3 + rng.index(10));
    const std::size_t k = 1 + rng.index(dag.size() - 1);
    const auto trace = random_trace(dag, k, 200, rng);
    Bucketing alg(dag, k, seed);
    alg.run(trace);
    for (const auto& log : alg.phase_logs()) {
      if (!log.completed || log.initial_buckets == 0) continue;
      EXPECT_EQ(log.last_bucket_stale(), 0u);
      ++checked;
    }
  }
  EXPECT_GT(checked, 500u);
}

// With dependencies the last bucket can be charged a stale fetch. Items
// z=0, w=1, x=2 with x depending on w and z; q=3, r=4, s=5 isolated; k=4.
// After x, q the pool regenerates as {T(x), {q}}. Evicting x then w leaves
// T(x) as {z}; the request for w evicts q and fetches w back as a stale
// fetch charged to T(x), which is then the last bucket to freeze; the
// final requests evict z and regenerate the pool.
TEST(BucketingProperties, LastBucketCanHaveStaleFetchesWithEdges) {
  const auto dag = DependencyDag::build(6, {{2, 1}, {2, 0}});
  const std::vector<Item> trace{2, 3, 4, 5, 1, 3, 2};
  bool found = false;
  for (std::uint64_t seed = 0; seed < 500 && !found; ++seed) {
    Bucketing alg(dag, 4, seed);
    alg.run(trace);
    for (const auto& log : alg.phase_logs()) {
      if (log.completed && log.initial_buckets > 0 && log.last_bucket_stale() > 0) {
        found = true;
        EXPECT_EQ(log.initial_buckets, 2u);
        EXPECT_EQ(log.freeze_order.back(), 0u);
      }
    }
  }
  EXPECT_TRUE(found);
}

}  // namespace
}  // namespace depcache
