#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "depcache/bucketing.hpp"
#include "depcache/dag.hpp"
#include "depcache/error.hpp"

namespace depcache {

// sqrt(k / H_min(k, l)): the bucket-overlap size above which a request is
// bypassed instead of fetched.
inline double bypass_threshold(std::size_t k, std::size_t ell) {
  if (k == 0 || ell == 0) fail(ErrorCode::InvalidArgument, "threshold needs k >= 1 and l >= 1");
  return std::sqrt(static_cast<double>(k) / harmonic(std::min(k, ell)));
}

// Per-phase cap on shrink-bypasses: k / threshold = sqrt(k * H_min(k, l)).
inline double shrink_bypass_cap(std::size_t k, std::size_t ell) {
  return std::sqrt(static_cast<double>(k) * harmonic(std::min(k, ell)));
}

class BucketingBypass : public BucketingCore {
 public:
  // `ell` is the maximum antichain size of `dag`; computed here when absent.
  BucketingBypass(const DependencyDag& dag, std::size_t k, std::uint64_t seed, std::optional<std::size_t> ell = {})
      : BucketingCore(dag, k, seed),
        ell_(ell ? *ell : (dag.empty() ? 1 : max_antichain_size(dag))),
        threshold_(bypass_threshold(k, ell_)),
        shrink_count_(static_cast<std::size_t>(std::ceil(threshold_))) {}

  std::string_view name() const override { return "bypass"; }
  double threshold() const { return threshold_; }
  std::size_t antichain_size() const { return ell_; }

  RequestOutcome serve(Item v) override {
    const auto tv = checked_request(*dag_, capacity(), v);
    RequestOutcome out;
    out.request = v;
    out.phase_before = phase();

    if (cache_.contains(v)) {
      shrink(as_set(tv));
      finish(out, ServeAction::Hit);
      return out;
    }

    // tv is in increasing tau, so the first uncached entry is the frontier item.
    const Item w = *std::find_if(tv.begin(), tv.end(), [this](Item x) { return !cache_.contains(x); });
    const ItemSet tw = dag_->descendants(w);
    const ItemSet overlap = tw & pool_.covered(dag_->size());

    if (static_cast<double>(overlap.count()) > threshold_) {
      std::vector<Item> by_tau;
      for (auto i = overlap.find_first(); i != ItemSet::npos; i = overlap.find_next(i)) by_tau.push_back(static_cast<Item>(i));
      std::sort(by_tau.begin(), by_tau.end(), [this](Item a, Item b) { return dag_->tau().less(a, b); });
      by_tau.resize(shrink_count_);
      shrink(as_set(by_tau));
      out.shrunk = std::move(by_tau);
      ++logs_.back().shrink_bypasses;
      finish(out, ServeAction::BypassedWithShrink);
      return out;
    }

    shrink(tw);
    evict_and_fetch(w, tw, out);
    finish(out, w == v ? ServeAction::Fetched : ServeAction::FetchedAndBypassed);
    return out;
  }

 private:
  void finish(RequestOutcome& out, ServeAction action) {
    out.action = action;
    out.bypassed = action == ServeAction::BypassedWithShrink || action == ServeAction::FetchedAndBypassed;
    out.cost = out.fetched.size() + (out.bypassed ? 1 : 0);
    ++logs_.back().requests;
    if (out.bypassed) ++logs_.back().bypasses;
    out.phase_after = phase();
    account(out);
  }

  std::size_t ell_;
  double threshold_;
  std::size_t shrink_count_;
};

}  // namespace depcache
