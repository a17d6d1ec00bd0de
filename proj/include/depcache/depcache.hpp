#pragma once

#include "depcache/baselines.hpp"
#include "depcache/bucketing.hpp"
#include "depcache/buckets.hpp"
#include "depcache/bypass.hpp"
#include "depcache/cache.hpp"
#include "depcache/dag.hpp"
#include "depcache/error.hpp"
#include "depcache/harness.hpp"
#include "depcache/opt_oracle.hpp"
#include "depcache/policy.hpp"
#include "depcache/random.hpp"
#include "depcache/recursive_lru.hpp"
#include "depcache/verify.hpp"
#include "depcache/workload.hpp"
