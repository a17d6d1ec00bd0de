#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "depcache/dag.hpp"
#include "depcache/error.hpp"
#include "depcache/random.hpp"

namespace depcache {

struct Trace {
  std::vector<Item> requests;
  std::string generator = "file";
  std::vector<std::pair<std::string, std::string>> params;
  std::uint64_t seed = 0;

  std::size_t size() const { return requests.size(); }
};

// Rejects any request that is out of range or cannot fit a k-item cache.
inline void validate_trace(const DependencyDag& dag, std::span<const Item> requests, std::size_t k) {
  std::vector<std::size_t> fit(dag.size(), 0);  // 0 unknown, 1 fits, 2 too large
  for (Item v : requests) {
    dag.check_id(v);
    if (fit[v] == 0) fit[v] = dag.descendant_count(v) <= k ? 1 : 2;
    if (fit[v] == 2) {
      fail(ErrorCode::RequestTooLarge, "item " + std::to_string(v) + " has more than k-1 dependencies for k=" + std::to_string(k));
    }
  }
}

// ---------------------------------------------------------------------------
// Balanced binary trees, heap numbered: node i has children 2i+1 and 2i+2.

enum class TreeOrientation {
  ChildDependsOnAncestors,  // T(v) is the root path of v
  NodeDependsOnSubtree,     // T(v) is the subtree under v
};

inline constexpr std::size_t kMaxTreeHeight = 24;

inline DependencyDag gen_balanced_tree(std::size_t height,
                                       TreeOrientation orientation = TreeOrientation::ChildDependsOnAncestors) {
  if (height < 1 || height > kMaxTreeHeight) fail(ErrorCode::InvalidHeight, "tree height must be in [1, 24]");
  const std::size_t n = (std::size_t{1} << height) - 1;
  std::vector<Edge> edges;
  edges.reserve(n - 1);
  for (Item child = 1; child < n; ++child) {
    const Item parent = (child - 1) / 2;
    if (orientation == TreeOrientation::ChildDependsOnAncestors) {
      edges.push_back({child, parent});
    } else {
      edges.push_back({parent, child});
    }
  }
  return DependencyDag::build(n, edges);
}

// 1-based depth; the root has depth 1.
inline std::size_t tree_depth(Item node) { return static_cast<std::size_t>(std::bit_width(std::uint64_t{node} + 1)); }

inline double riemann_zeta(double a) {
  if (!(a > 1.0)) fail(ErrorCode::InvalidArgument, "zeta series needs a > 1");
  return std::riemann_zeta(a);
}

enum class ZipfReading {
  PerNode,   // Pr(i) is each node's probability; level i carries (h-i+1)^-a / zeta(a)
  PerLevel,  // Pr(i) is the mass of the whole level
};

inline constexpr std::size_t kMaxRejections = 1'000'000;

namespace detail {

template <typename Draw>
std::vector<Item> rejection_sample(const DependencyDag& dag, std::size_t len, std::size_t k, Draw&& draw) {
  std::vector<Item> out;
  out.reserve(len);
  std::vector<int> fits(dag.size(), -1);
  for (std::size_t r = 0; r < len; ++r) {
    std::size_t attempts = 0;
    for (;;) {
      const Item v = draw();
      if (fits[v] < 0) fits[v] = dag.descendant_count(v) <= k ? 1 : 0;
      if (fits[v] == 1) {
        out.push_back(v);
        break;
      }
      if (++attempts >= kMaxRejections) fail(ErrorCode::AllItemsPruned, "rejection sampling exhausted its retry budget");
    }
  }
  return out;
}

inline std::string fmt_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace detail

// Depth drawn from the Zipf-over-levels law, node uniform within the level,
// requests whose T(v) exceeds k redrawn.
inline Trace gen_zipf_trace(const DependencyDag& tree, std::size_t height, double a, std::size_t len, std::size_t k,
                            std::uint64_t seed, ZipfReading reading = ZipfReading::PerNode) {
  if (tree.size() != (std::size_t{1} << height) - 1) fail(ErrorCode::InvalidParameters, "tree size does not match height");
  const double zeta = riemann_zeta(a);
  const auto h = static_cast<double>(height);
  std::vector<double> level_mass(height);
  bool any_admissible = false;
  for (std::size_t i = 1; i <= height; ++i) {
    double mass = std::pow(h - static_cast<double>(i) + 1.0, -a) / zeta;
    if (reading == ZipfReading::PerLevel) mass /= std::ldexp(1.0, static_cast<int>(i) - 1);
    level_mass[i - 1] = mass;
    // All nodes of a level have the same |T(v)| in a balanced tree.
    const Item first = static_cast<Item>((std::size_t{1} << (i - 1)) - 1);
    if (tree.descendant_count(first) <= k) any_admissible = true;
  }
  if (!any_admissible) fail(ErrorCode::AllItemsPruned, "no tree level fits a cache of size " + std::to_string(k));
  std::mt19937_64 engine(seed);
  std::discrete_distribution<std::size_t> level(level_mass.begin(), level_mass.end());
  Trace trace;
  trace.requests = detail::rejection_sample(tree, len, k, [&]() {
    const std::size_t depth = level(engine) + 1;
    const std::size_t width = std::size_t{1} << (depth - 1);
    std::uniform_int_distribution<std::size_t> offset(0, width - 1);
    return static_cast<Item>(width - 1 + offset(engine));
  });
  trace.generator = "zipf";
  trace.seed = seed;
  trace.params = {{"h", std::to_string(height)},
                  {"a", detail::fmt_double(a)},
                  {"k", std::to_string(k)},
                  {"reading", reading == ZipfReading::PerNode ? "per-node" : "per-level"}};
  return trace;
}

// Index i in [1, 2^h - 1] with Pr(i) proportional to (1-p)^(i-1) p; node id i-1.
inline Trace gen_geometric_trace(const DependencyDag& tree, std::size_t height, double p, std::size_t len, std::size_t k,
                                 std::uint64_t seed) {
  if (!(p > 0.0 && p < 1.0)) fail(ErrorCode::InvalidArgument, "geometric parameter must lie in (0, 1)");
  const std::size_t n = (std::size_t{1} << height) - 1;
  if (tree.size() != n) fail(ErrorCode::InvalidParameters, "tree size does not match height");
  bool any_admissible = false;
  for (Item v = 0; v < n && !any_admissible; ++v) any_admissible = tree.descendant_count(v) <= k;
  if (!any_admissible) fail(ErrorCode::AllItemsPruned, "no item fits a cache of size " + std::to_string(k));
  std::mt19937_64 engine(seed);
  std::geometric_distribution<std::uint64_t> failures(p);
  Trace trace;
  // Truncation to [1, n] is folded into the same rejection loop as pruning.
  trace.requests = detail::rejection_sample(tree, len, k, [&]() {
    for (std::size_t tries = 0; tries < kMaxRejections; ++tries) {
      const std::uint64_t index = failures(engine) + 1;
      if (index <= n) return static_cast<Item>(index - 1);
    }
    fail(ErrorCode::AllItemsPruned, "truncated geometric draw exhausted its retry budget");
  });
  trace.generator = "geometric";
  trace.seed = seed;
  trace.params = {{"h", std::to_string(height)}, {"p", detail::fmt_double(p)}, {"k", std::to_string(k)}};
  return trace;
}

// ---------------------------------------------------------------------------
// Hard instance: l-1 isolated items plus one chain of k-l+2 items.

struct LowerBoundInstance {
  DependencyDag dag;
  std::size_t k = 0;
  std::size_t ell = 0;
  std::vector<Item> distinguished;  // the isolated items plus the chain head
  std::vector<Item> rest;           // the chain below its head, increasing tau
};

inline LowerBoundInstance gen_lower_bound_instance(std::size_t k, std::size_t ell) {
  if (ell < 1 || ell >= k) fail(ErrorCode::InvalidParameters, "lower-bound instance needs 1 <= l < k");
  LowerBoundInstance inst;
  inst.k = k;
  inst.ell = ell;
  const std::size_t n = k + 1;
  const Item chain_bottom = static_cast<Item>(ell - 1);
  const Item head = static_cast<Item>(k);
  std::vector<Edge> edges;
  for (Item x = chain_bottom + 1; x <= head; ++x) edges.push_back({x, x - 1});
  inst.dag = DependencyDag::build(n, edges);
  for (Item x = 0; x < chain_bottom; ++x) inst.distinguished.push_back(x);
  inst.distinguished.push_back(head);
  for (Item x = chain_bottom; x < head; ++x) inst.rest.push_back(x);
  return inst;
}

// Each subsequence: one request to r(i) drawn from L \ {r(i-1)}, then one
// request to every item of U \ L.
inline Trace gen_lower_bound_trace(const LowerBoundInstance& inst, std::size_t subsequences, std::uint64_t seed) {
  const std::size_t L = inst.distinguished.size();
  if (L < 2) fail(ErrorCode::InvalidParameters, "the random walk over L needs l >= 2");
  RandomSource rng(seed);
  Trace trace;
  trace.requests.reserve(subsequences * (1 + inst.rest.size()));
  std::size_t previous = L;
  for (std::size_t s = 0; s < subsequences; ++s) {
    std::size_t pick;
    if (previous == L) {
      pick = rng.index(L);
    } else {
      pick = rng.index(L - 1);
      if (pick >= previous) ++pick;
    }
    previous = pick;
    trace.requests.push_back(inst.distinguished[pick]);
    trace.requests.insert(trace.requests.end(), inst.rest.begin(), inst.rest.end());
  }
  trace.generator = "lower-bound";
  trace.seed = seed;
  trace.params = {{"k", std::to_string(inst.k)}, {"l", std::to_string(inst.ell)}, {"subsequences", std::to_string(subsequences)}};
  return trace;
}

// ---------------------------------------------------------------------------
// Random small instances for property checks.

// Acyclic by construction: edges only run from a higher to a lower position
// of a random permutation.
inline DependencyDag random_dag(std::size_t n, double edge_probability, RandomSource& rng) {
  std::vector<Item> perm(n);
  for (Item i = 0; i < n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng.engine());
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (rng.unit() < edge_probability) edges.push_back({perm[i], perm[j]});
    }
  }
  return DependencyDag::build(n, edges);
}

// Uniform requests over the items that fit a k-item cache.
inline std::vector<Item> random_trace(const DependencyDag& dag, std::size_t k, std::size_t len, RandomSource& rng) {
  std::vector<Item> admissible;
  for (Item v = 0; v < dag.size(); ++v) {
    if (dag.descendant_count(v) <= k) admissible.push_back(v);
  }
  if (admissible.empty()) fail(ErrorCode::AllItemsPruned, "no item fits the cache");
  std::vector<Item> out(len);
  for (auto& v : out) v = admissible[rng.index(admissible.size())];
  return out;
}

// ---------------------------------------------------------------------------
// Trace files: '#' header comments, then one item id per line.

inline void write_trace(std::ostream& out, const Trace& trace) {
  out << "# generator=" << trace.generator << ", seed=" << trace.seed;
  for (const auto& [key, value] : trace.params) out << ", " << key << '=' << value;
  out << '\n';
  for (Item v : trace.requests) out << v << '\n';
}

inline Trace read_trace(std::istream& in) {
  Trace trace;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    long long id = -1;
    if (!(fields >> id) || id < 0) fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected an item id");
    std::string extra;
    if (fields >> extra) fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": trailing input");
    trace.requests.push_back(static_cast<Item>(id));
  }
  return trace;
}

inline Trace load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, "cannot open trace file " + path);
  return read_trace(in);
}

}  // namespace depcache
