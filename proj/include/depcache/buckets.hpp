#pragma once

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

#include "depcache/cache.hpp"
#include "depcache/dag.hpp"
#include "depcache/error.hpp"
#include "depcache/random.hpp"

namespace depcache {

struct Bucket {
  std::vector<Item> items;
  Item origin = 0;     // maximal cached item whose T(origin) seeded the bucket
  std::size_t id = 0;  // creation index within the phase
};

inline Item max_tau_item(const Bucket& bucket, const TauOrder& tau) {
  if (bucket.items.empty()) fail(ErrorCode::EmptyBucket, "maximum item of an empty bucket");
  return *std::max_element(bucket.items.begin(), bucket.items.end(),
                           [&tau](Item a, Item b) { return tau.less(a, b); });
}

// A bucket freezes once it is empty, holds an uncached item, or its
// maximum-tau item gained a cached dependent.
inline bool is_frozen(const Bucket& bucket, const CacheState& cache, const DependencyDag& dag) {
  if (bucket.items.empty()) return true;
  for (Item x : bucket.items) {
    if (!cache.contains(x)) return true;
  }
  return !cache.is_evictable(dag, max_tau_item(bucket, dag.tau()));
}

// The live bucket pool. Frozen buckets are dropped as soon as they are
// detected; the order of the remaining buckets is stable.
class BucketPool {
 public:
  BucketPool() = default;

  // One bucket T(x) per maximal cached item x, in increasing id of x.
  static BucketPool reset(const CacheState& cache, const DependencyDag& dag) {
    BucketPool pool;
    for (Item x : cache.maximal_cached(dag)) {
      Bucket b;
      b.origin = x;
      b.id = pool.buckets_.size();
      ItemSet t = dag.descendants(x);
      for (auto i = t.find_first(); i != ItemSet::npos; i = t.find_next(i)) b.items.push_back(static_cast<Item>(i));
      pool.buckets_.push_back(std::move(b));
    }
    pool.initial_count_ = pool.buckets_.size();
    return pool;
  }

  bool empty() const { return buckets_.empty(); }
  std::size_t size() const { return buckets_.size(); }
  std::size_t initial_count() const { return initial_count_; }
  std::size_t frozen_count() const { return frozen_count_; }
  std::span<const Bucket> buckets() const { return buckets_; }
  const Bucket& at(std::size_t pos) const { return buckets_.at(pos); }

  // Removes `items` from every bucket, then drops frozen buckets. Returns
  // the ids of the buckets that froze, in pool order.
  std::vector<std::size_t> remove_items(const CacheState& cache, const DependencyDag& dag, const ItemSet& items) {
    for (Bucket& b : buckets_) {
      std::erase_if(b.items, [&items](Item x) { return x < items.size() && items.test(x); });
    }
    return drop_frozen(cache, dag);
  }

  std::vector<std::size_t> remove_items(const CacheState& cache, const DependencyDag& dag, std::span<const Item> items) {
    ItemSet set(dag.size());
    for (Item x : items) set.set(x);
    return remove_items(cache, dag, set);
  }

  std::vector<std::size_t> drop_frozen(const CacheState& cache, const DependencyDag& dag) {
    std::vector<std::size_t> frozen;
    std::erase_if(buckets_, [&](const Bucket& b) {
      if (!is_frozen(b, cache, dag)) return false;
      frozen.push_back(b.id);
      return true;
    });
    frozen_count_ += frozen.size();
    check_invariants(cache, dag);
    return frozen;
  }

  // Position of a uniformly chosen live bucket; one draw from rng.
  std::size_t pick_uniform(RandomSource& rng) const {
    if (buckets_.empty()) fail(ErrorCode::EmptyPool, "no live bucket to choose from");
    return rng.index(buckets_.size());
  }

  // Items present in at least one live bucket.
  ItemSet covered(std::size_t universe) const {
    ItemSet out(universe);
    for (const Bucket& b : buckets_) {
      for (Item x : b.items) out.set(x);
    }
    return out;
  }

  bool satisfies_invariants(const CacheState& cache, const DependencyDag& dag) const {
    return std::none_of(buckets_.begin(), buckets_.end(),
                        [&](const Bucket& b) { return is_frozen(b, cache, dag); });
  }

 private:
  void check_invariants([[maybe_unused]] const CacheState& cache, [[maybe_unused]] const DependencyDag& dag) const {
#ifndef NDEBUG
    assert(satisfies_invariants(cache, dag));
#endif
  }

  std::vector<Bucket> buckets_;
  std::size_t initial_count_ = 0;
  std::size_t frozen_count_ = 0;
};

inline BucketPool reset_buckets(const CacheState& cache, const DependencyDag& dag) {
  return BucketPool::reset(cache, dag);
}

}  // namespace depcache
