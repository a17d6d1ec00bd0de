// Replays a short trace on the eleven-item example and prints every action.
#include <iostream>

#include "depcache/depcache.hpp"

int main() {
  using namespace depcache;
  const auto dag = DependencyDag::build(11, {{10, 8}, {10, 7}, {10, 4}, {9, 7}, {9, 6}, {8, 5},
                                             {7, 3}, {7, 4}, {6, 2}, {5, 1}, {5, 0}, {4, 0}});
  const std::vector<Item> trace{10, 9, 3, 10, 6, 2, 9, 0, 8, 10};
  const std::size_t k = 8;
  std::cout << "items=" << dag.size() << " k=" << k << " max antichain=" << max_antichain_size(dag) << '\n';

  BucketingBypass bypass(dag, k, 7);
  std::cout << "bypass threshold=" << bypass.threshold() << '\n';
  for (Item v : trace) {
    const auto out = bypass.serve(v);
    std::cout << "request " << v << ": " << to_string(out.action) << " cost=" << out.cost;
    if (!out.fetched.empty()) {
      std::cout << " fetched";
      for (Item x : out.fetched) std::cout << ' ' << x;
    }
    if (!out.evicted.empty()) {
      std::cout << " evicted";
      for (Item x : out.evicted) std::cout << ' ' << x;
    }
    std::cout << " phase=" << out.phase_after << '\n';
  }

  Bucketing bucketing(dag, k, 7);
  RecursiveLru det(dag, k);
  const OptOracle oracle(dag, k);
  std::cout << "bucketing=" << bucketing.run(trace) << " det=" << det.run(trace) << " bypass=" << bypass.total_cost()
            << " opt=" << oracle.cost(trace) << " opt_bypass=" << oracle.cost_with_bypass(trace) << '\n';
}
