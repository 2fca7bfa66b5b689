#pragma once

// Execution traces for the multi-stage allocation algorithms.  A trace embeds
// the instance it was produced from plus everything the certification engine
// needs to rebuild the run: per-stage solutions, capacity snapshots, solver
// gaps, and the exact LP duals of the final stage.

#include <cstdint>
#include <string>
#include <vector>

#include "batchalloc/model.hpp"
#include "batchalloc/simplex.hpp"

namespace batchalloc {

struct StageTrace {
  // Returned allocation for the stage.  Matching variants index variables by
  // the canonical stage-edge enumeration (batch online order, then each
  // online's edge list order); the configuration variant stores its full
  // variable vector in the program's documented block order.
  std::vector<double> x;
  // Pre-rounding fractional solution when the returned allocation was
  // rounded (integral b-matching); empty otherwise.
  std::vector<double> x_fractional;

  // Capacity state per offline vertex, in raw units (spent budget for the
  // budgeted variants), before and after the stage.
  std::vector<double> y_before;
  std::vector<double> y_after;

  // Held-impression distribution per (advertiser, price level), row-major
  // advertisers x levels; used by the configuration variant only.
  std::vector<double> eta_before;
  std::vector<double> eta_after;

  double fw_gap = 0.0;  // measured linearization gap of the stage solution
  double value = 0.0;   // allocation value collected in this stage

  // Final stage only: the exact LP solution with duals and reduced costs.
  bool lp_exact = false;
  LpSolution last_lp;

  // Integral budgeted rounding only: sampled stage variable (edge) index
  // per batch online (-1 = unmatched), whether the grant fit the true
  // budget, and the true integral spend per offline before/after the stage.
  std::vector<int> choice;
  std::vector<std::uint8_t> granted;
  std::vector<double> spend_before;
  std::vector<double> spend_after;
};

struct RunTrace {
  std::string algo;
  Instance instance;
  double objective = 0.0;   // total value (integral spend for integral modes)
  double fw_gap_max = 0.0;  // max stage gap
  double rho = 0.0;         // budget-trim factor (integral budgeted rounding)
  std::uint64_t seed = 0;   // sampling seed (integral budgeted rounding)
  std::vector<StageTrace> stages;
};

}  // namespace batchalloc
