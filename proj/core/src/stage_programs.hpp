#pragma once

// Internal builders turning one stage of a matching-family instance into the
// separable concave program consumed by the stage solver, plus the
// structural decomposition shared by the integral rounding and the
// certification engine.
//
// Canonical stage-edge enumeration: batch onlines in order, then each
// online's edge list in order.  All capacity state is kept in raw units
// (spent budget for the budgeted variants); the builder normalizes
// regularizer arguments by the capacity itself.

#include <vector>

#include "batchalloc/model.hpp"
#include "stage_refine.hpp"

namespace batchalloc::detail {

struct MatchingStageProgram {
  SparseLp polytope;             // online rows first, then touched-offline rows
  SeparableObjective objective;  // linear part doubles as the value vector
  std::vector<double> update_coef;  // capacity consumed per unit of each var
  std::vector<int> var_offline;     // offline endpoint per var
  std::vector<int> var_online;      // batch-local online per var
  std::vector<int> row_offline;     // offline behind each row >= num_online
  int num_online = 0;
};

// Builds the stage-k program (k is 1-based) given the per-offline capacity
// state y in raw units.
MatchingStageProgram build_matching_stage(const MatchingInstance& instance, int k,
                                          const std::vector<double>& y);

// Structural decomposition of a stage solution's support graph: the group of
// capacity-exhausted offline vertices with their supporting onlines first,
// then the connected components of the rest, ordered by smallest online
// index.  Vertices without any support edge belong to no group.
struct StageGroup {
  std::vector<int> onlines;   // batch-local indices
  std::vector<int> offlines;  // offline indices
};

struct StageDecomposition {
  StageGroup exhausted;             // may be empty
  std::vector<StageGroup> groups;   // remaining components
  std::vector<double> inflow;       // per offline, in raw capacity units
};

inline constexpr double kSupportEps = 1e-7;

StageDecomposition decompose_matching_stage(const MatchingInstance& instance, int k,
                                            const std::vector<double>& y,
                                            const std::vector<double>& x);

}  // namespace batchalloc::detail
