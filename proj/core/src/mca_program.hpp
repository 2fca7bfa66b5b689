#pragma once

// Internal builder for one stage of the configuration-allocation program.
//
// Variable layout (canonical block order):
//   x block: one variable per positive-share allocation triple, enumerated
//     batch user order, then config order, then allocation order; worth its
//     price level per unit of impression mass, bounded by share * config.
//   z block: one variable per (user, config), objective zero.
//   y block: one variable per (advertiser, level) whose held mass from the
//     previous stages is positive, enumerated advertiser-major; worth its
//     price per unit kept, upper-bounded by the held mass.
// Row layout: touched-advertiser rows (sum of the advertiser's x and y at
// most 1), then user rows (sum of z at most 1), then one coupling row per x
// variable (x at most share * z).  The objective constant subtracts the full
// value of the held distribution, so the stage value telescopes into the
// final revenue.

#include <vector>

#include "batchalloc/model.hpp"
#include "stage_refine.hpp"

namespace batchalloc::detail {

struct McaTripleRef {
  int user = 0;    // batch-local
  int config = 0;
  int alloc = 0;
  int j = 0;       // advertiser
  int tau = 0;     // 1-based price level
  double xi = 0.0;
  double price = 0.0;
};

struct McaStageProgram {
  SparseLp polytope;
  SeparableObjective objective;
  std::vector<McaTripleRef> triples;          // x block
  std::vector<std::pair<int, int>> z_of;      // (user, config) per z var
  std::vector<std::pair<int, int>> y_of;      // (advertiser, tau) per y var
  int z_col0 = 0;
  int y_col0 = 0;
  std::vector<int> adv_row;     // advertiser -> row index or -1
  std::vector<int> user_row;    // batch-local user -> row index
  std::vector<int> triple_row;  // x var -> coupling row
};

// eta is the held distribution, row-major advertisers x levels.
McaStageProgram build_mca_stage(const McaInstance& instance, int k,
                                const std::vector<double>& eta);

// Cumulative distribution H[j*T + tau-1] = mass of advertiser j held at
// price level tau or above in the given stage solution.
std::vector<double> mca_cumulative(const McaInstance& instance, const McaStageProgram& prog,
                                   const std::vector<double>& x);

// Held distribution after the stage: per (advertiser, level), new x mass at
// that exact level plus the kept y mass.
std::vector<double> mca_advance(const McaInstance& instance, const McaStageProgram& prog,
                                const std::vector<double>& x);

}  // namespace batchalloc::detail
