#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "depcache/dag.hpp"
#include "depcache/error.hpp"

namespace depcache {

// A dependency-closed set of at most `capacity` cached items.
class CacheState {
 public:
  CacheState() = default;
  CacheState(std::size_t universe, std::size_t capacity) : capacity_(capacity), cached_(universe) {
    if (capacity == 0) fail(ErrorCode::InvalidCapacity, "cache capacity must be positive");
  }

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  bool full() const { return size_ >= capacity_; }
  bool contains(Item x) const { return x < cached_.size() && cached_.test(x); }
  const ItemSet& items() const { return cached_; }

  bool contains_all(const ItemSet& set) const { return set.is_subset_of(cached_); }

  // Closure makes direct parents sufficient: any cached ancestor of y would
  // force a fully cached path down to y, ending in a cached direct parent.
  bool is_evictable(const DependencyDag& dag, Item y) const {
    if (!contains(y)) fail(ErrorCode::NotCached, "item " + std::to_string(y) + " is not cached");
    for (Item p : dag.dependents(y)) {
      if (cached_.test(p)) return false;
    }
    return true;
  }

  // Cached items with no cached direct parent, in increasing id.
  std::vector<Item> maximal_cached(const DependencyDag& dag) const {
    std::vector<Item> out;
    for (auto i = cached_.find_first(); i != ItemSet::npos; i = cached_.find_next(i)) {
      Item x = static_cast<Item>(i);
      bool has_cached_parent = false;
      for (Item p : dag.dependents(x)) {
        if (cached_.test(p)) {
          has_cached_parent = true;
          break;
        }
      }
      if (!has_cached_parent) out.push_back(x);
    }
    return out;
  }

  void fetch(const DependencyDag& dag, Item x) {
    dag.check_id(x);
    if (contains(x)) fail(ErrorCode::AlreadyCached, "item " + std::to_string(x) + " already cached");
    for (Item d : dag.dependencies(x)) {
      if (!cached_.test(d)) {
        fail(ErrorCode::MissingDependencies, "item " + std::to_string(x) + " needs " + std::to_string(d) + " cached first");
      }
    }
    if (full()) fail(ErrorCode::CacheFull, "no room to fetch item " + std::to_string(x));
    cached_.set(x);
    ++size_;
  }

  void evict(const DependencyDag& dag, Item y) {
    dag.check_id(y);
    if (!is_evictable(dag, y)) {
      fail(ErrorCode::WouldBreakFeasibility, "item " + std::to_string(y) + " still has a cached dependent");
    }
    cached_.reset(y);
    --size_;
  }

  // Full invariant check: capacity and closure over every cached item.
  bool is_feasible(const DependencyDag& dag) const {
    if (size_ > capacity_ || size_ != cached_.count()) return false;
    for (auto i = cached_.find_first(); i != ItemSet::npos; i = cached_.find_next(i)) {
      for (Item d : dag.dependencies(static_cast<Item>(i))) {
        if (!cached_.test(d)) return false;
      }
    }
    return true;
  }

  friend bool operator==(const CacheState& a, const CacheState& b) {
    return a.capacity_ == b.capacity_ && a.cached_ == b.cached_;
  }

 private:
  std::size_t capacity_ = 1;
  std::size_t size_ = 0;
  ItemSet cached_;
};

}  // namespace depcache
