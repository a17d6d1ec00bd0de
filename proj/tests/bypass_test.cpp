#include <gtest/gtest.h>

#include "support.hpp"

namespace depcache {
namespace {

using testing::chain_edges;

TEST(BypassThreshold, Values) {
  EXPECT_DOUBLE_EQ(bypass_threshold(1, 1), 1.0);
  EXPECT_NEAR(bypass_threshold(4, 4), std::sqrt(48.0 / 25.0), 1e-12);
  EXPECT_NEAR(bypass_threshold(4, 9), 1.3856406460551, 1e-12);
  EXPECT_NEAR(bypass_threshold(100, 100), std::sqrt(100.0 / 5.18737751763962), 1e-12);
  EXPECT_NEAR(bypass_threshold(100, 100), 4.3906, 1e-4);
  EXPECT_NEAR(shrink_bypass_cap(4, 4), 4.0 / bypass_threshold(4, 4), 1e-12);
  EXPECT_THROW(bypass_threshold(0, 1), Error);
}

TEST(BucketingBypass, ChainIsFetchedOneLevelPerRequest) {
  const auto dag = DependencyDag::build(3, chain_edges(3));
  BucketingBypass alg(dag, 3, 1);
  EXPECT_EQ(alg.antichain_size(), 1u);

  auto out = alg.serve(2);
  EXPECT_EQ(out.fetched, std::vector<Item>{0});
  EXPECT_EQ(out.action, ServeAction::FetchedAndBypassed);
  EXPECT_EQ(out.cost, 2u);

  out = alg.serve(2);
  EXPECT_EQ(out.fetched, std::vector<Item>{1});
  EXPECT_TRUE(out.bypassed);
  EXPECT_EQ(out.cost, 2u);

  out = alg.serve(2);
  EXPECT_EQ(out.fetched, std::vector<Item>{2});
  EXPECT_EQ(out.action, ServeAction::Fetched);
  EXPECT_EQ(out.cost, 1u);

  out = alg.serve(2);
  EXPECT_EQ(out.action, ServeAction::Hit);
  EXPECT_EQ(out.cost, 0u);
  EXPECT_EQ(alg.total_cost(), 5u);
  EXPECT_EQ(alg.stats().bypasses, 2u);
}

// Item 5 depends on leaves 0..4; 6 and 7 are isolated. Once the leaves sit
// in live buckets, a request for 5 overlaps them above the threshold.
TEST(BucketingBypass, LargeOverlapShrinksWithoutFetching) {
  const auto dag = DependencyDag::build(8, {{5, 0}, {5, 1}, {5, 2}, {5, 3}, {5, 4}});
  bool exercised = false;
  for (std::uint64_t seed = 0; seed < 200 && !exercised; ++seed) {
    BucketingBypass alg(dag, 6, seed);
    alg.run(std::vector<Item>{0, 1, 2, 3, 4, 6});
    const auto fill = alg.serve(7);
    ASSERT_EQ(fill.evicted.size(), 1u);
    if (fill.evicted[0] != 6) continue;
    exercised = true;
    const std::size_t removed = static_cast<std::size_t>(std::ceil(alg.threshold()));
    ASSERT_GT(5.0, alg.threshold());
    const auto out = alg.serve(5);
    EXPECT_EQ(out.action, ServeAction::BypassedWithShrink);
    EXPECT_TRUE(out.fetched.empty());
    EXPECT_TRUE(out.evicted.empty());
    EXPECT_EQ(out.cost, 1u);
    ASSERT_EQ(out.shrunk.size(), removed);
    for (std::size_t i = 0; i < removed; ++i) EXPECT_EQ(out.shrunk[i], static_cast<Item>(i));
    const auto covered = alg.pool().covered(dag.size());
    for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(covered.test(i), i >= removed);
    EXPECT_EQ(alg.phase_logs().back().shrink_bypasses, 1u);
  }
  EXPECT_TRUE(exercised);
}

TEST(BucketingBypass, HitRemovesClosureFromBuckets) {
  const auto dag = DependencyDag::edge_free(3);
  BucketingBypass alg(dag, 2, 3);
  alg.run(std::vector<Item>{0, 1, 2});
  ASSERT_EQ(alg.pool().size(), 1u);
  const Item kept = alg.pool().at(0).items[0];
  const auto out = alg.serve(kept);
  EXPECT_EQ(out.cost, 0u);
  EXPECT_TRUE(alg.pool().empty());
}

TEST(BucketingBypass, ShrinkCapHoldsPerPhase) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    RandomSource rng(seed);
    const auto dag = random_dag(3 + rng.index(15), 0.3, rng);
    const std::size_t k = 2 + rng.index(8);
    const auto trace = random_trace(dag, k, 200, rng);
    BucketingBypass alg(dag, k, seed);
    std::size_t violations = 0;
    alg.set_observer([&](const CacheState& c) { violations += !c.is_feasible(dag); });
    std::size_t summed = 0;
    for (Item v : trace) {
      const auto out = alg.serve(v);
      summed += out.cost;
      EXPECT_EQ(out.cost, out.fetched.size() + (out.bypassed ? 1 : 0));
      EXPECT_LE(out.fetched.size(), 1u);
      if (!out.bypassed) {
        EXPECT_TRUE(alg.cache().contains(v));
      }
    }
    EXPECT_EQ(violations, 0u);
    EXPECT_EQ(summed, alg.total_cost());
    for (const auto& log : alg.phase_logs()) {
      EXPECT_LE(static_cast<double>(log.shrink_bypasses), shrink_bypass_cap(k, alg.antichain_size()));
    }
  }
}

}  // namespace
}  // namespace depcache
