#pragma once

// Multi-stage allocation algorithms of the matching family.  Each algorithm
// processes the K batches in order; stages before the last solve a
// regularized concave program (so that later stages keep room for future
// arrivals), while the last stage is a plain LP solved exactly with duals
// recorded for certification.  Returned traces embed the instance and every
// per-stage solution.

#include <cstdint>

#include "batchalloc/frankwolfe.hpp"
#include "batchalloc/model.hpp"
#include "batchalloc/regularizers.hpp"
#include "batchalloc/trace.hpp"

namespace batchalloc {

// How the per-stage concave programs are solved.  The default refinement
// mode drives the measured linearization gap to target_gap (near machine
// precision); use_fw switches to plain conditional gradient under fw's
// iteration budget for literature-parity benchmarking.
struct StageSolverConfig {
  bool use_fw = false;
  fw::Config fw;
  double target_gap = 1e-10;
  int max_rounds = 100;
};

// Budget-trim factor and sampling seed for the integral budgeted-allocation
// rounding; rho must lie in [0, 1).
struct AdwordsRoundingConfig {
  double rho = 0.0;
  std::uint64_t seed = 0;
};

// Default trim factor min(0.5, sqrt(2 ln(B_min) / B_min)) from the smallest
// offline budget of the instance.
double default_rho(const MatchingInstance& instance);

// Multi-stage fractional maximum vertex-weighted matching (unit capacities).
RunTrace pr_mwm(const MatchingInstance& instance, const RegularizerSchedule& schedule,
                const StageSolverConfig& cfg = {});

// Multi-stage vertex-weighted b-matching.  Fractional mode mirrors pr_mwm
// with capacity-normalized regularizer arguments; integral mode rounds each
// stage solution group-by-group through a totally unimodular LP whose
// per-offline totals stay within one unit of the fractional totals.
RunTrace pr_mwbm(const MatchingInstance& instance, const RegularizerSchedule& schedule,
                 const StageSolverConfig& cfg = {}, bool integral = false);

// Multi-stage fractional budgeted allocation: bid-weighted objective,
// budget-normalized regularizer, spend never exceeds any budget.
RunTrace pr_f_adwords(const MatchingInstance& instance, const RegularizerSchedule& schedule,
                      const StageSolverConfig& cfg = {});

// Integral budgeted allocation: runs the fractional algorithm on trimmed
// budgets (1-rho)B_j, then each batch online samples one neighbor with the
// stage solution as its distribution (keyed by seed, stage, and global
// online index) and the bid is granted only if it fits the true remaining
// budget.  The trace objective is the realized integral spend.
RunTrace pr_i_adwords(const MatchingInstance& instance, const RegularizerSchedule& schedule,
                      const StageSolverConfig& cfg, const AdwordsRoundingConfig& rounding);

}  // namespace batchalloc
