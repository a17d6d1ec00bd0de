#pragma once

#include <cstddef>
#include <initializer_list>
#include <set>
#include <vector>

#include "depcache/depcache.hpp"

namespace depcache::testing {

// The eleven-item example universe, labelled 1..11; lbl() maps a label to its id.
constexpr Item lbl(Item label) { return label - 1; }

inline DependencyDag example_dag() {
  const std::initializer_list<std::pair<Item, Item>> labelled{
      {11, 9}, {11, 8}, {11, 5}, {10, 8}, {10, 7}, {9, 6}, {8, 4}, {8, 5}, {7, 3}, {6, 2}, {6, 1}, {5, 1}};
  std::vector<Edge> edges;
  for (auto [u, v] : labelled) edges.push_back({lbl(u), lbl(v)});
  return DependencyDag::build(11, edges);
}

// Labels 1..8 cached with k = 8.
inline CacheState example_cache(const DependencyDag& dag) {
  CacheState cache(dag.size(), 8);
  for (Item x : dag.tau().order()) {
    if (x < 8) cache.fetch(dag, x);
  }
  return cache;
}

inline std::set<Item> labels(const std::vector<Item>& ids) {
  std::set<Item> out;
  for (Item x : ids) out.insert(x + 1);
  return out;
}

inline std::set<Item> labels(const ItemSet& set) {
  std::set<Item> out;
  for (auto i = set.find_first(); i != ItemSet::npos; i = set.find_next(i)) out.insert(static_cast<Item>(i) + 1);
  return out;
}

inline std::vector<Edge> chain_edges(std::size_t n) {
  std::vector<Edge> edges;
  for (Item x = 1; x < n; ++x) edges.push_back({x, x - 1});
  return edges;
}

}  // namespace depcache::testing
