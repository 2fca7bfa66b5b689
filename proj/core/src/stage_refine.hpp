#pragma once

// Internal engine for the per-stage concave programs.  Every stage objective
// in this library has the separable form
//
//   G(v) = linear . v + constant - sum_r coef_r * F_k(base_r + a_r . v)
//
// with F_k the convex stage primitive and each aggregate base_r + a_r . v
// confined to [0, 1] on the feasible set.  Two solution modes:
//
//  * secant-segment refinement (default): replace each F_k term by its
//    piecewise-linear interpolant on a per-term breakpoint set.  Segments
//    enter the LP as bounded columns hanging off one coupling row per term,
//    so the model stays small and well conditioned at any resolution; since
//    secant slopes increase, the LP fills segments in order by itself.  Each
//    round inserts the achieved aggregates as breakpoints (the interpolant
//    is exact there) and bisects their neighboring segments, shrinking the
//    local mesh geometrically, so the measured linearization gap collapses
//    to near machine precision instead of the O(1/iters) of plain
//    conditional gradient.
//
//  * plain conditional gradient (use_fw): literature-parity mode with a
//    fixed iteration budget.
//
// The final stage has F_K == 0, so it is solved as a plain LP and its duals
// are exposed for the last-stage certificates.

#include <utility>
#include <vector>

#include "batchalloc/frankwolfe.hpp"
#include "batchalloc/regularizers.hpp"
#include "batchalloc/simplex.hpp"

namespace batchalloc::detail {

struct SeparableTerm {
  double coef = 0.0;  // multiplier, >= 0
  double base = 0.0;  // aggregate offset
  std::vector<std::pair<int, double>> weights;  // sparse a_r entries (var, a)
};

struct SeparableObjective {
  RegularizerSchedule schedule;
  int k = 1;  // stage index, 1-based
  std::vector<double> linear;
  double constant = 0.0;
  std::vector<SeparableTerm> terms;

  double aggregate(const SeparableTerm& term, const std::vector<double>& v) const;
  double value(const std::vector<double>& v) const;
  std::vector<double> gradient(const std::vector<double>& v) const;
};

struct StageSolveOptions {
  bool use_fw = false;
  fw::Config fw_config;      // only read when use_fw
  double target_gap = 1e-10; // refinement stop
  int max_rounds = 100;
};

struct StageSolveResult {
  std::vector<double> x;
  double value = 0.0;
  double gap = 0.0;        // linearization gap measured at x
  LpSolution last_lp;      // populated when lp_was_exact
  bool lp_was_exact = false;  // true iff the stage program was a plain LP
};

StageSolveResult solve_stage(const SeparableObjective& objective, const SparseLp& polytope,
                             const StageSolveOptions& options = {});

}  // namespace batchalloc::detail
