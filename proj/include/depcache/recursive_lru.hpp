#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <set>
#include <string_view>
#include <utility>
#include <vector>

#include "depcache/cache.hpp"
#include "depcache/dag.hpp"
#include "depcache/policy.hpp"

namespace depcache {

// Deterministic recursive LRU. Serving v first stamps T(v) top-to-bottom
// (decreasing tau), so the deepest dependencies carry the freshest
// timestamps, then fetches the missing items bottom-to-top, each time
// evicting the least recently stamped evictable item.
class RecursiveLru : public OnlinePolicy {
 public:
  RecursiveLru(const DependencyDag& dag, std::size_t k)
      : dag_(&dag), cache_(dag.size(), k), stamp_(dag.size(), kNever) {}

  std::string_view name() const override { return "det"; }
  const CacheState& cache() const override { return cache_; }
  std::int64_t timestamp(Item x) const { return stamp_.at(x); }

  RequestOutcome serve(Item v) override {
    const auto tv = checked_request(*dag_, cache_.capacity(), v);
    RequestOutcome out;
    out.request = v;

    for (auto it = tv.rbegin(); it != tv.rend(); ++it) touch(*it);

    for (Item w : tv) {
      if (cache_.contains(w)) continue;
      if (cache_.full()) {
        const Item y = oldest_evictable();
        cache_.evict(*dag_, y);
        by_age_.erase({stamp_[y], y});
        out.evicted.push_back(y);
        notify(cache_);
      }
      cache_.fetch(*dag_, w);
      by_age_.insert({stamp_[w], w});
      out.fetched.push_back(w);
      notify(cache_);
    }
    out.action = out.fetched.empty() ? ServeAction::Hit : ServeAction::Fetched;
    out.cost = out.fetched.size();
    account(out);
    return out;
  }

 private:
  static constexpr std::int64_t kNever = std::numeric_limits<std::int64_t>::min();

  void touch(Item x) {
    if (cache_.contains(x)) by_age_.erase({stamp_[x], x});
    stamp_[x] = ++clock_;
    if (cache_.contains(x)) by_age_.insert({stamp_[x], x});
  }

  // A full cache always holds an evictable item outside T(v), and all of
  // T(v) was just stamped, so the scan never settles on a requested item.
  Item oldest_evictable() const {
    for (const auto& [stamp, x] : by_age_) {
      if (cache_.is_evictable(*dag_, x)) return x;
    }
    fail(ErrorCode::InternalError, "full cache without an evictable item");
  }

  const DependencyDag* dag_;
  CacheState cache_;
  std::vector<std::int64_t> stamp_;
  std::set<std::pair<std::int64_t, Item>> by_age_;  // cached items, oldest first; ties by id
  std::int64_t clock_ = 0;
};

}  // namespace depcache
