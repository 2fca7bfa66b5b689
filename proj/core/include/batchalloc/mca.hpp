#pragma once

// Multi-stage configuration allocation with free disposal.  Each user in a
// batch offers a menu of configurations; choosing configuration mass hands
// impression shares to advertisers at levels of a global price universe.
// Advertisers hold a distribution of impressions over price levels; newly
// won impressions may displace held lower-priced ones (the displaced mass is
// disposed and its value refunded).  Stages before the last solve a
// regularized concave program over (configuration, allocation, kept-mass)
// variables; the last stage is a plain LP solved exactly with duals.

#include "batchalloc/algorithms.hpp"
#include "batchalloc/model.hpp"
#include "batchalloc/regularizers.hpp"
#include "batchalloc/trace.hpp"

namespace batchalloc {

// Runs the multi-stage configuration-allocation algorithm on a normalized
// instance (unit demands; run normalize_mca first otherwise).  The trace
// stores, per stage, the full variable vector in block order (allocation
// triples, configuration indicators, kept masses) plus the held distribution
// before and after; its objective is the sum of per-stage net payments,
// which telescopes to the value of the final held distribution.
RunTrace pr_mca(const McaInstance& instance, const RegularizerSchedule& schedule,
                const StageSolverConfig& cfg = {});

// Value of the final held distribution of a configuration-allocation trace:
// the sum over advertisers and price levels of price times held mass after
// the last stage.
double revenue(const RunTrace& trace);

}  // namespace batchalloc
