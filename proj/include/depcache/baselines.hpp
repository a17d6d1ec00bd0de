#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <list>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "depcache/cache.hpp"
#include "depcache/dag.hpp"
#include "depcache/policy.hpp"
#include "depcache/random.hpp"

namespace depcache {

namespace detail {
inline void require_edge_free(const DependencyDag& dag, std::string_view who) {
  if (!dag.is_edge_free()) fail(ErrorCode::UnsupportedDag, std::string(who) + " only runs on edge-free universes");
}
}  // namespace detail

// Classic LRU over independent items.
class Lru : public OnlinePolicy {
 public:
  Lru(const DependencyDag& dag, std::size_t k) : dag_(&dag), cache_(dag.size(), k) {
    detail::require_edge_free(dag, "lru");
  }

  std::string_view name() const override { return "lru"; }
  const CacheState& cache() const override { return cache_; }

  RequestOutcome serve(Item v) override {
    dag_->check_id(v);
    RequestOutcome out;
    out.request = v;
    if (auto it = where_.find(v); it != where_.end()) {
      recency_.splice(recency_.end(), recency_, it->second);
      out.action = ServeAction::Hit;
    } else {
      if (cache_.full()) {
        Item y = recency_.front();
        recency_.pop_front();
        where_.erase(y);
        cache_.evict(*dag_, y);
        out.evicted.push_back(y);
        notify(cache_);
      }
      cache_.fetch(*dag_, v);
      where_[v] = recency_.insert(recency_.end(), v);
      out.fetched.push_back(v);
      out.action = ServeAction::Fetched;
      notify(cache_);
    }
    out.cost = out.fetched.size();
    account(out);
    return out;
  }

 private:
  const DependencyDag* dag_;
  CacheState cache_;
  std::list<Item> recency_;  // least recent first
  std::unordered_map<Item, std::list<Item>::iterator> where_;
};

// Random Mark over independent items. A phase ends at the first miss that
// finds every cached item marked; the unmarked list is then rebuilt in
// increasing id and shrinks stably, one uniform draw per eviction.
class RandomMark : public OnlinePolicy {
 public:
  RandomMark(const DependencyDag& dag, std::size_t k, std::uint64_t seed)
      : dag_(&dag), cache_(dag.size(), k), rng_(seed) {
    detail::require_edge_free(dag, "random-mark");
    stats_.phases = 1;
  }

  std::string_view name() const override { return "random-mark"; }
  const CacheState& cache() const override { return cache_; }
  const std::vector<Item>& unmarked() const { return unmarked_; }

  RequestOutcome serve(Item v) override {
    dag_->check_id(v);
    RequestOutcome out;
    out.request = v;
    out.phase_before = stats_.phases;
    mark(v);
    if (!cache_.contains(v)) {
      if (cache_.full()) {
        if (unmarked_.empty()) {
          ++stats_.phases;
          for (auto i = cache_.items().find_first(); i != ItemSet::npos; i = cache_.items().find_next(i)) {
            unmarked_.push_back(static_cast<Item>(i));
          }
        }
        const std::size_t pos = rng_.index(unmarked_.size());
        const Item y = unmarked_[pos];
        unmarked_.erase(unmarked_.begin() + static_cast<std::ptrdiff_t>(pos));
        cache_.evict(*dag_, y);
        out.evicted.push_back(y);
        notify(cache_);
      }
      cache_.fetch(*dag_, v);
      out.fetched.push_back(v);
      notify(cache_);
    }
    out.action = out.fetched.empty() ? ServeAction::Hit : ServeAction::Fetched;
    out.cost = out.fetched.size();
    out.phase_after = stats_.phases;
    account(out);
    return out;
  }

 private:
  void mark(Item v) { std::erase(unmarked_, v); }

  const DependencyDag* dag_;
  CacheState cache_;
  RandomSource rng_;
  std::vector<Item> unmarked_;
};

}  // namespace depcache
