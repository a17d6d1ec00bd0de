#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <queue>
#include <utility>
#include <vector>

#include "depcache/dag.hpp"

namespace depcache::testing {

// Exhaustive search over lazy schedules, built from first principles:
// feasibility is tested directly on edge lists, every intermediate cache is
// reached by single legal fetches (cost 1) and evictions (cost 0), and the
// search memoizes on (position, cache contents).
class NaiveOracle {
 public:
  NaiveOracle(const DependencyDag& dag, std::size_t k) : n_(dag.size()), k_(k), edges_(dag.edges().begin(), dag.edges().end()) {}

  std::size_t cost(const std::vector<Item>& trace, bool bypass) {
    trace_ = trace;
    bypass_ = bypass;
    memo_.clear();
    return search(0, 0);
  }

 private:
  using Mask = std::uint32_t;
  static constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max() / 4;

  bool closed(Mask m) const {
    for (const Edge& e : edges_) {
      if ((m >> e.from & 1u) && !(m >> e.to & 1u)) return false;
    }
    return static_cast<std::size_t>(__builtin_popcount(m)) <= k_;
  }

  Mask closure_of(Item v) const {
    Mask m = Mask{1} << v;
    for (bool grew = true; grew;) {
      grew = false;
      for (const Edge& e : edges_) {
        if ((m >> e.from & 1u) && !(m >> e.to & 1u)) {
          m |= Mask{1} << e.to;
          grew = true;
        }
      }
    }
    return m;
  }

  // Cheapest way to reach every cache from `start` (Dijkstra, 0/1 weights).
  std::map<Mask, std::size_t> reachable(Mask start) const {
    std::map<Mask, std::size_t> dist{{start, 0}};
    using Entry = std::pair<std::size_t, Mask>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
    queue.push({0, start});
    while (!queue.empty()) {
      auto [d, m] = queue.top();
      queue.pop();
      if (dist[m] < d) continue;
      for (Item x = 0; x < n_; ++x) {
        const Mask next = m ^ (Mask{1} << x);
        if (!closed(next)) continue;
        const std::size_t nd = d + ((m >> x & 1u) ? 0 : 1);
        auto it = dist.find(next);
        if (it == dist.end() || nd < it->second) {
          dist[next] = nd;
          queue.push({nd, next});
        }
      }
    }
    return dist;
  }

  std::size_t search(std::size_t pos, Mask cache) {
    if (pos == trace_.size()) return 0;
    if (auto it = memo_.find({pos, cache}); it != memo_.end()) return it->second;
    const Mask need = closure_of(trace_[pos]);
    std::size_t best = kInf;
    for (auto [m, d] : reachable(cache)) {
      if ((m & need) == need) best = std::min(best, d + search(pos + 1, m));
      else if (bypass_) best = std::min(best, d + 1 + search(pos + 1, m));
    }
    memo_[{pos, cache}] = best;
    return best;
  }

  std::size_t n_;
  std::size_t k_;
  std::vector<Edge> edges_;
  std::vector<Item> trace_;
  bool bypass_ = false;
  std::map<std::pair<std::size_t, Mask>, std::size_t> memo_;
};

}  // namespace depcache::testing
