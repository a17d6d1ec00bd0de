#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "depcache/cache.hpp"
#include "depcache/dag.hpp"

namespace depcache {

enum class ServeAction {
  Hit,                 // requested item already cached
  Fetched,             // missing part of T(v) fetched, then served
  BypassedWithShrink,  // bypassed; buckets shrunk, nothing fetched
  FetchedAndBypassed,  // frontier item fetched, request itself bypassed
};

constexpr std::string_view to_string(ServeAction a) {
  switch (a) {
    case ServeAction::Hit: return "hit";
    case ServeAction::Fetched: return "fetched";
    case ServeAction::BypassedWithShrink: return "bypassed-with-shrink";
    case ServeAction::FetchedAndBypassed: return "fetched-and-bypassed";
  }
  return "unknown";
}

struct RequestOutcome {
  Item request = 0;
  ServeAction action = ServeAction::Hit;
  std::vector<Item> fetched;      // in fetch order
  std::vector<bool> fetch_clean;  // parallel to `fetched`; only logged by phase-based policies
  std::vector<Item> evicted;      // in eviction order
  std::vector<Item> shrunk;       // items dropped from buckets by a shrink-bypass
  bool bypassed = false;
  std::size_t cost = 0;           // fetches + (bypassed ? 1 : 0)
  std::size_t phase_before = 0;
  std::size_t phase_after = 0;
};

// Counters for the span of one fragment: a stretch of a phase during which
// the number of live buckets does not change.
struct FragmentStats {
  std::size_t evictions = 0;
  std::size_t clean = 0;
  std::size_t stale = 0;
};

struct PhaseLog {
  std::size_t index = 0;         // 1-based
  ItemSet start_cache;           // snapshot taken when the pool was regenerated
  std::size_t initial_buckets = 0;
  std::size_t clean = 0;
  std::size_t stale = 0;
  std::size_t evictions = 0;
  std::size_t bypasses = 0;
  std::size_t shrink_bypasses = 0;
  std::size_t requests = 0;
  std::vector<FragmentStats> fragments;   // indexed by buckets already frozen
  std::vector<std::size_t> stale_by_bucket;  // stale fetches attributed to each bucket id
  std::vector<std::size_t> freeze_order;     // bucket ids in the order they froze
  bool completed = false;                    // closed by the next regeneration

  std::size_t cost() const { return clean + stale + bypasses; }

  // Stale fetches charged to the bucket that froze last; meaningful only
  // for completed phases that started with at least one bucket.
  std::size_t last_bucket_stale() const {
    if (freeze_order.empty()) return 0;
    return stale_by_bucket.at(freeze_order.back());
  }
};

struct PolicyStats {
  std::size_t total_cost = 0;
  std::size_t fetches = 0;
  std::size_t evictions = 0;
  std::size_t phases = 0;
  std::size_t clean = 0;
  std::size_t stale = 0;
  std::size_t bypasses = 0;
};

// Called after every single fetch or eviction, i.e. at every intermediate
// cache state a policy passes through.
using StepObserver = std::function<void(const CacheState&)>;

class OnlinePolicy {
 public:
  virtual ~OnlinePolicy() = default;

  virtual std::string_view name() const = 0;
  virtual RequestOutcome serve(Item v) = 0;
  virtual const CacheState& cache() const = 0;
  virtual std::span<const PhaseLog> phase_logs() const { return {}; }

  const PolicyStats& stats() const { return stats_; }
  std::size_t total_cost() const { return stats_.total_cost; }

  void set_observer(StepObserver observer) { observer_ = std::move(observer); }

  std::size_t run(std::span<const Item> trace) {
    for (Item v : trace) serve(v);
    return stats_.total_cost;
  }

 protected:
  void notify(const CacheState& cache) const {
    if (observer_) observer_(cache);
  }

  void account(const RequestOutcome& out) {
    stats_.total_cost += out.cost;
    stats_.fetches += out.fetched.size();
    stats_.evictions += out.evicted.size();
    if (out.bypassed) ++stats_.bypasses;
  }

  PolicyStats stats_;

 private:
  StepObserver observer_;
};

// |T(v)| <= k is the model's standing assumption on every request.
inline std::vector<Item> checked_request(const DependencyDag& dag, std::size_t k, Item v) {
  dag.check_id(v);
  auto tv = dag.descendants_by_tau(v);
  if (tv.size() > k) {
    fail(ErrorCode::RequestTooLarge, "item " + std::to_string(v) + " needs " + std::to_string(tv.size()) +
                                         " slots but the cache holds " + std::to_string(k));
  }
  return tv;
}

}  // namespace depcache
