#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <unordered_map>
#include <vector>

#include "depcache/dag.hpp"
#include "depcache/error.hpp"

namespace depcache {

// A dependency-closed item set of size <= k, one bit per item.
using ConfigMask = std::uint32_t;

inline constexpr std::size_t kMaxOracleItems = 24;
inline constexpr std::size_t kDefaultStateBudget = 2'000'000;

namespace detail {
inline ConfigMask mask_of(const ItemSet& set) {
  ConfigMask m = 0;
  for (auto i = set.find_first(); i != ItemSet::npos; i = set.find_next(i)) m |= ConfigMask{1} << i;
  return m;
}
}  // namespace detail

// Every closed subset of size <= k, found by walking items in tau order and
// only admitting an item once all its direct dependencies are in.
inline std::vector<ConfigMask> enumerate_feasible(const DependencyDag& dag, std::size_t k,
                                                  std::size_t budget = kDefaultStateBudget) {
  const std::size_t n = dag.size();
  if (n > kMaxOracleItems) fail(ErrorCode::StateSpaceTooLarge, "oracle limited to 24 items, got " + std::to_string(n));
  std::vector<ConfigMask> deps(n, 0);
  for (Item x = 0; x < n; ++x) {
    for (Item d : dag.dependencies(x)) deps[x] |= ConfigMask{1} << d;
  }
  const auto& order = dag.tau().order();
  std::vector<ConfigMask> out;
  auto walk = [&](auto& self, std::size_t pos, ConfigMask current, std::size_t size) -> void {
    if (pos == n) {
      if (out.size() >= budget) fail(ErrorCode::StateSpaceTooLarge, "more than " + std::to_string(budget) + " feasible configurations");
      out.push_back(current);
      return;
    }
    const Item x = order[pos];
    self(self, pos + 1, current, size);
    if (size < k && (deps[x] & ~current) == 0) self(self, pos + 1, current | (ConfigMask{1} << x), size + 1);
  };
  walk(walk, 0, 0, 0);
  std::sort(out.begin(), out.end());
  return out;
}

// Exact offline optimum over the feasible configuration graph. Moving from
// Q' to Q costs |Q \ Q'| (evict Q' \ Q top-down, then fetch Q \ Q'
// bottom-up); the DP splits each step into free single-item evictions
// followed by unit-cost single-item fetches.
class OptOracle {
 public:
  OptOracle(const DependencyDag& dag, std::size_t k, std::size_t budget = kDefaultStateBudget)
      : dag_(&dag), k_(k), configs_(enumerate_feasible(dag, k, budget)) {
    index_.reserve(configs_.size() * 2);
    for (std::size_t i = 0; i < configs_.size(); ++i) index_.emplace(configs_[i], i);
    up_.resize(configs_.size());
    down_.resize(configs_.size());
    for (std::size_t i = 0; i < configs_.size(); ++i) {
      for (Item x = 0; x < dag.size(); ++x) {
        const ConfigMask bit = ConfigMask{1} << x;
        if (configs_[i] & bit) continue;
        if (auto it = index_.find(configs_[i] | bit); it != index_.end()) {
          up_[i].push_back(it->second);
          down_[it->second].push_back(i);
        }
      }
    }
    by_size_.resize(configs_.size());
    for (std::size_t i = 0; i < configs_.size(); ++i) by_size_[i] = i;
    std::stable_sort(by_size_.begin(), by_size_.end(),
                     [this](std::size_t a, std::size_t b) { return std::popcount(configs_[a]) < std::popcount(configs_[b]); });
  }

  std::size_t state_count() const { return configs_.size(); }
  std::span<const ConfigMask> configs() const { return configs_; }

  std::size_t cost(std::span<const Item> trace) const { return solve(trace, false); }
  std::size_t cost_with_bypass(std::span<const Item> trace) const { return solve(trace, true); }

 private:
  static constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max() / 4;

  std::size_t solve(std::span<const Item> trace, bool allow_bypass) const {
    std::vector<std::size_t> best(configs_.size(), kInf);
    best[index_.at(0)] = 0;
    std::vector<std::size_t> relaxed(configs_.size());
    for (Item r : trace) {
      const ItemSet t = dag_->descendants(r);
      if (t.count() > k_) fail(ErrorCode::RequestTooLarge, "request " + std::to_string(r) + " does not fit");
      const ConfigMask need = detail::mask_of(t);
      // Free evictions: a config inherits the best value of any superset.
      for (auto it = by_size_.rbegin(); it != by_size_.rend(); ++it) {
        std::size_t i = *it;
        relaxed[i] = best[i];
        for (std::size_t u : up_[i]) relaxed[i] = std::min(relaxed[i], relaxed[u]);
      }
      // Unit-cost fetches, smallest configs first.
      for (std::size_t i : by_size_) {
        for (std::size_t d : down_[i]) relaxed[i] = std::min(relaxed[i], relaxed[d] + 1);
      }
      for (std::size_t i = 0; i < configs_.size(); ++i) {
        if ((configs_[i] & need) == need) {
          best[i] = relaxed[i];
        } else {
          best[i] = allow_bypass ? relaxed[i] + 1 : kInf;
        }
      }
    }
    return *std::min_element(best.begin(), best.end());
  }

  const DependencyDag* dag_;
  std::size_t k_;
  std::vector<ConfigMask> configs_;
  std::unordered_map<ConfigMask, std::size_t> index_;
  std::vector<std::vector<std::size_t>> up_;
  std::vector<std::vector<std::size_t>> down_;
  std::vector<std::size_t> by_size_;
};

inline std::size_t opt_cost(const DependencyDag& dag, std::size_t k, std::span<const Item> trace) {
  return OptOracle(dag, k).cost(trace);
}

inline std::size_t opt_cost_bypass(const DependencyDag& dag, std::size_t k, std::span<const Item> trace) {
  return OptOracle(dag, k).cost_with_bypass(trace);
}

}  // namespace depcache
