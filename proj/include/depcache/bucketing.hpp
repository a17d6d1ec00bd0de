#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "depcache/buckets.hpp"
#include "depcache/cache.hpp"
#include "depcache/dag.hpp"
#include "depcache/policy.hpp"
#include "depcache/random.hpp"

namespace depcache {

// Shared machinery of Bucketing and BucketingBypass: the bucket pool, phase
// regeneration and the randomized EvictAndFetch step, plus the clean/stale
// bookkeeping per phase.
class BucketingCore : public OnlinePolicy {
 public:
  BucketingCore(const DependencyDag& dag, std::size_t k, std::uint64_t seed)
      : dag_(&dag), cache_(dag.size(), k), rng_(seed), evictor_(dag.size(), kNoBucket), evictor_phase_(dag.size(), 0) {
    start_phase();
  }

  const CacheState& cache() const override { return cache_; }
  std::span<const PhaseLog> phase_logs() const override { return logs_; }
  const BucketPool& pool() const { return pool_; }
  std::size_t capacity() const { return cache_.capacity(); }
  std::size_t phase() const { return logs_.size(); }
  RandomSource& rng() { return rng_; }

 protected:
  static constexpr std::size_t kNoBucket = std::numeric_limits<std::size_t>::max();

  void start_phase() {
    if (!logs_.empty()) logs_.back().completed = true;
    pool_ = BucketPool::reset(cache_, *dag_);
    PhaseLog log;
    log.index = logs_.size() + 1;
    log.start_cache = cache_.items();
    log.initial_buckets = pool_.size();
    log.stale_by_bucket.assign(pool_.size(), 0);
    log.fragments.resize(pool_.size() + 1);
    logs_.push_back(std::move(log));
    ++stats_.phases;
  }

  void record_freezes(const std::vector<std::size_t>& frozen) {
    auto& order = logs_.back().freeze_order;
    order.insert(order.end(), frozen.begin(), frozen.end());
  }

  void shrink(const ItemSet& items) { record_freezes(pool_.remove_items(cache_, *dag_, items)); }

  // Fetch w, evicting first if the cache is full. An empty pool is
  // regenerated only here, when an eviction is actually due; `request` is
  // then removed from the fresh pool as well.
  // All actions of one pseudo-request are charged to the fragment in which
  // its eviction is chosen, so each eviction pairs with the fetch after it.
  void evict_and_fetch(Item w, const ItemSet& request, RequestOutcome& out) {
    if (cache_.contains(w)) return;
    if (cache_.full() && pool_.empty()) {
      start_phase();
      shrink(request);
    }
    std::size_t fragment = pool_.frozen_count();
    if (cache_.full()) {
      if (pool_.empty()) fail(ErrorCode::InternalError, "full cache with an empty bucket pool");
      const Bucket& chosen = pool_.at(pool_.pick_uniform(rng_));
      const Item y = max_tau_item(chosen, dag_->tau());
      const std::size_t bucket_id = chosen.id;
      // Freezes are judged on the cache without y, so the bucket's next
      // maximum stays eligible once its dependent y is gone.
      cache_.evict(*dag_, y);
      ItemSet single(dag_->size());
      single.set(y);
      shrink(single);
      notify(cache_);
      out.evicted.push_back(y);
      evictor_[y] = bucket_id;
      evictor_phase_[y] = logs_.size();
      auto& log = logs_.back();
      ++log.evictions;
      ++log.fragments.at(fragment).evictions;
    }
    cache_.fetch(*dag_, w);
    notify(cache_);
    auto& log = logs_.back();
    const bool clean = !log.start_cache.test(w);
    out.fetched.push_back(w);
    out.fetch_clean.push_back(clean);
    if (clean) {
      ++log.clean;
      ++log.fragments.at(fragment).clean;
      ++stats_.clean;
    } else {
      ++log.stale;
      ++log.fragments.at(fragment).stale;
      ++stats_.stale;
      // A stale item was cached at phase start, so it left through an eviction in this phase.
      if (evictor_phase_[w] == logs_.size() && evictor_[w] != kNoBucket) ++log.stale_by_bucket.at(evictor_[w]);
    }
    // The new item may have frozen buckets whose maximum it depends on.
    record_freezes(pool_.drop_frozen(cache_, *dag_));
  }

  ItemSet as_set(std::span<const Item> items) const {
    ItemSet set(dag_->size());
    for (Item x : items) set.set(x);
    return set;
  }

  const DependencyDag* dag_;
  CacheState cache_;
  BucketPool pool_;
  RandomSource rng_;
  std::vector<PhaseLog> logs_;
  std::vector<std::size_t> evictor_;
  std::vector<std::size_t> evictor_phase_;
};

// Randomized dependency-aware marking: fetch T(v) bottom-up, evicting the
// maximum item of a uniformly chosen live bucket whenever the cache is full.
class Bucketing : public BucketingCore {
 public:
  Bucketing(const DependencyDag& dag, std::size_t k, std::uint64_t seed) : BucketingCore(dag, k, seed) {}

  std::string_view name() const override { return "bucketing"; }

  RequestOutcome serve(Item v) override {
    const auto tv = checked_request(*dag_, capacity(), v);
    const ItemSet tset = as_set(tv);
    RequestOutcome out;
    out.request = v;
    out.phase_before = phase();
    for (Item w : tv) {
      shrink(tset);
      evict_and_fetch(w, tset, out);
    }
    ++logs_.back().requests;
    out.action = out.fetched.empty() ? ServeAction::Hit : ServeAction::Fetched;
    out.cost = out.fetched.size();
    out.phase_after = phase();
    account(out);
    return out;
  }
};

}  // namespace depcache
