#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <queue>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "depcache/error.hpp"

namespace depcache {

using Item = std::uint32_t;
using ItemSet = boost::dynamic_bitset<std::uint64_t>;

// (u, v): u depends on v, so u may be cached only while v is cached.
struct Edge {
  Item from;
  Item to;
  friend bool operator==(const Edge&, const Edge&) = default;
};

// Fixed total order consistent with a reversed topological order:
// every dependency ranks strictly below its dependents.
class TauOrder {
 public:
  TauOrder() = default;
  explicit TauOrder(std::vector<Item> order) : order_(std::move(order)), rank_(order_.size()) {
    for (std::size_t pos = 0; pos < order_.size(); ++pos) rank_[order_[pos]] = pos;
  }

  std::size_t rank(Item x) const { return rank_.at(x); }
  Item at(std::size_t pos) const { return order_.at(pos); }
  std::size_t size() const { return order_.size(); }
  const std::vector<Item>& order() const { return order_; }

  bool less(Item a, Item b) const { return rank_[a] < rank_[b]; }

 private:
  std::vector<Item> order_;
  std::vector<std::size_t> rank_;
};

namespace detail {

// Kahn's algorithm over "dependencies first": an item becomes available once
// all items it depends on are emitted; ties go to the smallest id.
inline std::vector<Item> sinks_first_order(std::size_t n, const std::vector<std::vector<Item>>& deps,
                                           const std::vector<std::vector<Item>>& parents) {
  std::vector<std::size_t> pending(n);
  std::priority_queue<Item, std::vector<Item>, std::greater<>> ready;
  for (Item x = 0; x < n; ++x) {
    pending[x] = deps[x].size();
    if (pending[x] == 0) ready.push(x);
  }
  std::vector<Item> order;
  order.reserve(n);
  while (!ready.empty()) {
    Item x = ready.top();
    ready.pop();
    order.push_back(x);
    for (Item p : parents[x]) {
      if (--pending[p] == 0) ready.push(p);
    }
  }
  return order;
}

}  // namespace detail

class DependencyDag {
 public:
  DependencyDag() = default;

  static DependencyDag build(std::size_t n, std::span<const Edge> edges) {
    if (n > std::numeric_limits<Item>::max()) fail(ErrorCode::InvalidId, "item count exceeds id range");
    DependencyDag dag;
    dag.n_ = n;
    dag.deps_.assign(n, {});
    dag.parents_.assign(n, {});
    dag.edges_.assign(edges.begin(), edges.end());
    for (const Edge& e : edges) {
      if (e.from >= n || e.to >= n) {
        fail(ErrorCode::InvalidId, "edge (" + std::to_string(e.from) + ", " + std::to_string(e.to) +
                                       ") out of range for n=" + std::to_string(n));
      }
      if (e.from == e.to) fail(ErrorCode::SelfLoop, "self-loop on item " + std::to_string(e.from));
      dag.deps_[e.from].push_back(e.to);
      dag.parents_[e.to].push_back(e.from);
    }
    for (Item x = 0; x < n; ++x) {
      auto& d = dag.deps_[x];
      std::sort(d.begin(), d.end());
      if (std::adjacent_find(d.begin(), d.end()) != d.end()) {
        fail(ErrorCode::DuplicateEdge, "duplicate edge out of item " + std::to_string(x));
      }
      std::sort(dag.parents_[x].begin(), dag.parents_[x].end());
    }
    auto order = detail::sinks_first_order(n, dag.deps_, dag.parents_);
    if (order.size() != n) fail(ErrorCode::CycleDetected, "dependency graph is not acyclic");
    dag.tau_ = TauOrder(std::move(order));
    return dag;
  }

  static DependencyDag build(std::size_t n, std::initializer_list<Edge> edges) {
    return build(n, std::span<const Edge>(edges.begin(), edges.size()));
  }

  static DependencyDag edge_free(std::size_t n) { return build(n, std::span<const Edge>{}); }

  std::size_t size() const { return n_; }
  std::size_t edge_count() const { return edges_.size(); }
  bool empty() const { return n_ == 0; }
  bool is_edge_free() const { return edges_.empty(); }
  const std::vector<Edge>& edges() const { return edges_; }

  // Direct dependencies (out-neighbours) and direct dependents (in-neighbours).
  std::span<const Item> dependencies(Item x) const { return deps_.at(x); }
  std::span<const Item> dependents(Item x) const { return parents_.at(x); }

  const TauOrder& tau() const { return tau_; }

  void check_id(Item x) const {
    if (x >= n_) fail(ErrorCode::InvalidId, "item " + std::to_string(x) + " not in universe of size " + std::to_string(n_));
  }

  // T(x): x together with everything reachable from it.
  ItemSet descendants(Item x) const {
    check_id(x);
    ItemSet seen(n_);
    std::vector<Item> stack{x};
    seen.set(x);
    while (!stack.empty()) {
      Item u = stack.back();
      stack.pop_back();
      for (Item v : deps_[u]) {
        if (!seen.test(v)) {
          seen.set(v);
          stack.push_back(v);
        }
      }
    }
    return seen;
  }

  // T(x) listed in increasing tau, i.e. a valid bottom-up fetch order.
  std::vector<Item> descendants_by_tau(Item x) const {
    ItemSet set = descendants(x);
    std::vector<Item> out;
    out.reserve(set.count());
    for (auto i = set.find_first(); i != ItemSet::npos; i = set.find_next(i)) out.push_back(static_cast<Item>(i));
    std::sort(out.begin(), out.end(), [this](Item a, Item b) { return tau_.less(a, b); });
    return out;
  }

  std::size_t descendant_count(Item x) const { return descendants(x).count(); }

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<Item>> deps_;
  std::vector<std::vector<Item>> parents_;
  TauOrder tau_;
};

inline DependencyDag build_dag(std::size_t n, std::span<const Edge> edges) { return DependencyDag::build(n, edges); }

inline ItemSet descendants(const DependencyDag& dag, Item x) { return dag.descendants(x); }

// Recomputes the order from scratch; DependencyDag::tau() holds the same result.
inline TauOrder compute_tau(const DependencyDag& dag) {
  std::vector<std::vector<Item>> deps(dag.size()), parents(dag.size());
  for (Item x = 0; x < dag.size(); ++x) {
    deps[x].assign(dag.dependencies(x).begin(), dag.dependencies(x).end());
    parents[x].assign(dag.dependents(x).begin(), dag.dependents(x).end());
  }
  return TauOrder(detail::sinks_first_order(dag.size(), deps, parents));
}

// Strict reachability rows: row x holds every item reachable from x, x excluded.
inline std::vector<ItemSet> transitive_closure(const DependencyDag& dag) {
  const std::size_t n = dag.size();
  std::vector<ItemSet> reach(n, ItemSet(n));
  for (Item x : dag.tau().order()) {
    for (Item d : dag.dependencies(x)) {
      reach[x].set(d);
      reach[x] |= reach[d];
    }
  }
  return reach;
}

namespace detail {

// Hopcroft-Karp over a left/right copy of the item set.
class BipartiteMatcher {
 public:
  explicit BipartiteMatcher(std::vector<std::vector<Item>> adj)
      : adj_(std::move(adj)), match_left_(adj_.size(), kNone), match_right_(adj_.size(), kNone), dist_(adj_.size()) {}

  std::size_t solve() {
    std::size_t matched = 0;
    while (bfs()) {
      for (Item u = 0; u < adj_.size(); ++u) {
        if (match_left_[u] == kNone && dfs(u)) ++matched;
      }
    }
    return matched;
  }

 private:
  static constexpr Item kNone = std::numeric_limits<Item>::max();
  static constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max();

  bool bfs() {
    std::queue<Item> q;
    bool found = false;
    for (Item u = 0; u < adj_.size(); ++u) {
      if (match_left_[u] == kNone) {
        dist_[u] = 0;
        q.push(u);
      } else {
        dist_[u] = kInf;
      }
    }
    while (!q.empty()) {
      Item u = q.front();
      q.pop();
      for (Item v : adj_[u]) {
        Item w = match_right_[v];
        if (w == kNone) {
          found = true;
        } else if (dist_[w] == kInf) {
          dist_[w] = dist_[u] + 1;
          q.push(w);
        }
      }
    }
    return found;
  }

  bool dfs(Item u) {
    for (Item v : adj_[u]) {
      Item w = match_right_[v];
      if (w == kNone || (dist_[w] == dist_[u] + 1 && dfs(w))) {
        match_left_[u] = v;
        match_right_[v] = u;
        return true;
      }
    }
    dist_[u] = kInf;
    return false;
  }

  std::vector<std::vector<Item>> adj_;
  std::vector<Item> match_left_;
  std::vector<Item> match_right_;
  std::vector<std::size_t> dist_;
};

}  // namespace detail

inline constexpr std::size_t kMaxAntichainItems = 20000;

// Size of the largest set of pairwise incomparable items. By Dilworth this
// equals the minimum number of chains covering the order, which is n minus a
// maximum matching on the split transitive closure.
inline std::size_t max_antichain_size(const DependencyDag& dag) {
  const std::size_t n = dag.size();
  if (n == 0) fail(ErrorCode::EmptyUniverse, "antichain of an empty universe");
  if (dag.is_edge_free()) return n;
  if (n > kMaxAntichainItems) fail(ErrorCode::TooLarge, "transitive closure too large for n=" + std::to_string(n));
  auto reach = transitive_closure(dag);
  std::vector<std::vector<Item>> adj(n);
  for (Item x = 0; x < n; ++x) {
    for (auto y = reach[x].find_first(); y != ItemSet::npos; y = reach[x].find_next(y)) {
      adj[x].push_back(static_cast<Item>(y));
    }
  }
  return n - detail::BipartiteMatcher(std::move(adj)).solve();
}

inline constexpr std::size_t kMaxBruteforceItems = 22;

// Exhaustive branch search; test oracle for max_antichain_size.
inline std::size_t max_antichain_bruteforce(const DependencyDag& dag) {
  const std::size_t n = dag.size();
  if (n == 0) fail(ErrorCode::EmptyUniverse, "antichain of an empty universe");
  if (n > kMaxBruteforceItems) fail(ErrorCode::TooLarge, "brute force limited to 22 items");
  auto reach = transitive_closure(dag);
  std::vector<std::uint32_t> comparable(n, 0);
  for (Item x = 0; x < n; ++x) {
    for (Item y = 0; y < n; ++y) {
      if (reach[x].test(y) || reach[y].test(x)) comparable[x] |= (1u << y);
    }
  }
  std::size_t best = 0;
  std::function<void(Item, std::uint32_t, std::size_t)> search = [&](Item next, std::uint32_t allowed, std::size_t taken) {
    best = std::max(best, taken);
    for (Item x = next; x < n; ++x) {
      if (!(allowed >> x & 1u)) continue;
      std::size_t remaining = static_cast<std::size_t>(std::popcount(allowed >> x));
      if (taken + remaining <= best) return;
      search(x + 1, allowed & ~comparable[x] & ~(1u << x), taken + 1);
    }
  };
  search(0, n == 32 ? ~0u : ((1u << n) - 1), 0);
  return best;
}

inline double harmonic(std::size_t m) {
  if (m == 0) fail(ErrorCode::InvalidArgument, "harmonic number of 0");
  double sum = 0.0;
  for (std::size_t i = 1; i <= m; ++i) sum += 1.0 / static_cast<double>(i);
  return sum;
}

// Plain-text format: first non-comment line is n, then one "u v" edge per
// line (0-based, u depends on v). '#' starts a comment.
inline DependencyDag read_dag(std::istream& in) {
  std::optional<std::size_t> n;
  std::vector<Edge> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string probe;
    if (!(fields >> probe)) continue;
    fields.clear();
    fields.str(line);
    if (!n) {
      long long count = -1;
      if (!(fields >> count) || count < 0) fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected item count");
      n = static_cast<std::size_t>(count);
      continue;
    }
    long long u = -1, v = -1;
    if (!(fields >> u >> v) || u < 0 || v < 0) {
      fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected 'u v'");
    }
    std::string extra;
    if (fields >> extra) fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": trailing input");
    edges.push_back({static_cast<Item>(u), static_cast<Item>(v)});
  }
  if (!n) fail(ErrorCode::ParseError, "missing item count");
  return DependencyDag::build(*n, edges);
}

inline DependencyDag load_dag(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, "cannot open DAG file " + path);
  return read_dag(in);
}

inline void write_dag(std::ostream& out, const DependencyDag& dag) {
  out << dag.size() << '\n';
  for (const Edge& e : dag.edges()) out << e.from << ' ' << e.to << '\n';
}

}  // namespace depcache
