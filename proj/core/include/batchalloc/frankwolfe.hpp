#pragma once

#include <functional>
#include <vector>

#include "batchalloc/simplex.hpp"

namespace batchalloc::fw {

struct Config {
  int max_iters = 100;
  bool exact_line_search = true;  // false: open-loop step 2/(t+2)
  double gap_tol = 1e-6;
};

// Concave objective with an analytic gradient.
struct Objective {
  std::function<double(const std::vector<double>&)> value;
  std::function<std::vector<double>(const std::vector<double>&)> gradient;
};

struct Result {
  std::vector<double> point;
  double value = 0.0;
  double gap = 0.0;  // max_s <grad(point), s - point>, measured at `point`
  int iterations = 0;
};

// Conditional-gradient maximization over the polytope described by
// `polytope` (its objective vector is ignored; each iteration overwrites it
// with the current gradient).  `start` must be feasible.  The returned gap is
// an upper bound on the suboptimality of the returned point.
Result maximize(const Objective& objective, const SparseLp& polytope,
                const std::vector<double>& start, const Config& cfg = {});

}  // namespace batchalloc::fw
