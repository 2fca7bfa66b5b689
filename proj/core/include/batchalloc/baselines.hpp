#pragma once

// Comparison policies and offline benchmarks: the exact offline optimum LP
// for every instance variant, a one-user-at-a-time greedy, and a
// one-batch-at-a-time greedy (the multi-stage algorithms with the
// hedging term switched off).

#include <string>
#include <vector>

#include "batchalloc/model.hpp"

namespace batchalloc {

// Exact simplex optimum of the offline allocation LP.
//
// Variable order (primal):
//   matching variants:  every edge in canonical order (stage 1 online
//     vertices, then stage 2, ...; each online's edge list in order).
//   configuration variant:  every positive-share allocation triple in
//     canonical order, then every (user, configuration) pair in canonical
//     order.
// Row order (duals):
//   matching variants:  one row per online vertex in canonical order, then
//     one row per offline vertex.
//   configuration variant:  one row per advertiser, then one row per user in
//     canonical order, then one coupling row per allocation triple.
struct OfflineOptimum {
  double value = 0.0;
  std::vector<double> primal;
  std::vector<double> duals;
};

OfflineOptimum offline_opt(const Instance& instance);

struct PolicyResult {
  std::string policy;
  double objective = 0.0;
  std::vector<double> stage_values;  // one entry per stage
  double ratio = 0.0;                // objective / offline optimum
};

// Processes online vertices one at a time (batch order, then index order);
// each step solves the arriving vertex's marginal-value LP against the
// current remaining capacities (with optimal disposal of held impressions
// and fractional configuration mixes in the configuration variant).
// Deterministic: matching ties go to the lowest edge index, configuration
// ties to the solver's fixed pivot order.
PolicyResult online_greedy(const Instance& instance);

// Solves each stage's allocation LP without the hedging term (free disposal
// in the configuration variant), carrying capacity state across stages
// exactly like the multi-stage algorithms.
PolicyResult batched_greedy(const Instance& instance);

}  // namespace batchalloc
