#include "stage_refine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace batchalloc::detail {
namespace {

// Tight tolerances: the refinement loop needs the LP noise floor well below
// the gap target, and these programs are small and well scaled.
LpOptions tight_options() {
  LpOptions opts;
  opts.eps = 1e-11;
  opts.pivot_tol = 1e-12;
  return opts;
}

[[noreturn]] void solver_failure(const std::string& note) {
  throw std::runtime_error("solver-failure: stage program " + note);
}

LpSolution checked_solve(const SparseLp& lp) {
  LpSolution sol = solve(lp, tight_options());
  if (sol.status == LpStatus::infeasible) {
    throw std::invalid_argument("invalid-argument: stage polytope is infeasible");
  }
  if (sol.status != LpStatus::optimal) solver_failure(sol.note);
  return sol;
}

double clamp_unit(double t) { return std::clamp(t, 0.0, 1.0); }

constexpr double kMergeRadius = 1e-12;  // minimum breakpoint separation

}  // namespace

double SeparableObjective::aggregate(const SeparableTerm& term,
                                     const std::vector<double>& v) const {
  double t = term.base;
  for (const auto& [var, a] : term.weights) t += a * v[var];
  return clamp_unit(t);
}

double SeparableObjective::value(const std::vector<double>& v) const {
  double total = constant;
  for (std::size_t i = 0; i < linear.size(); ++i) total += linear[i] * v[i];
  for (const SeparableTerm& term : terms) {
    if (term.coef == 0.0) continue;
    total -= term.coef * big_f(schedule, k, aggregate(term, v));
  }
  return total;
}

std::vector<double> SeparableObjective::gradient(const std::vector<double>& v) const {
  std::vector<double> g = linear;
  for (const SeparableTerm& term : terms) {
    if (term.coef == 0.0) continue;
    double slope = term.coef * f(schedule, k, aggregate(term, v));
    for (const auto& [var, a] : term.weights) g[var] -= slope * a;
  }
  return g;
}

StageSolveResult solve_stage(const SeparableObjective& objective, const SparseLp& polytope,
                             const StageSolveOptions& options) {
  const int nv = polytope.cols();
  if (static_cast<int>(objective.linear.size()) != nv || objective.k < 1 ||
      objective.k > objective.schedule.K) {
    throw std::invalid_argument("invalid-argument: stage objective malformed");
  }
  for (const SeparableTerm& term : objective.terms) {
    if (term.coef < 0.0) throw std::invalid_argument("invalid-argument: negative term weight");
    for (const auto& [var, a] : term.weights) {
      if (var < 0 || var >= nv) {
        throw std::invalid_argument("invalid-argument: term variable out of range");
      }
    }
  }

  if (nv == 0) {
    // A stage with no decision variables (possible when a batch offers no
    // menus and nothing is held over): the empty solution is optimal and
    // every constraint row admits a zero dual.
    StageSolveResult result;
    result.value = objective.constant;
    result.last_lp.status = LpStatus::optimal;
    result.last_lp.duals.assign(polytope.rows(), 0.0);
    result.lp_was_exact = true;
    return result;
  }

  bool linear_stage = objective.k == objective.schedule.K;
  if (!linear_stage) {
    linear_stage = std::all_of(objective.terms.begin(), objective.terms.end(),
                               [](const SeparableTerm& t) {
                                 return t.coef == 0.0 || t.weights.empty();
                               });
  }
  if (linear_stage) {
    SparseLp lp = polytope;
    lp.c = objective.linear;
    LpSolution sol = checked_solve(lp);
    StageSolveResult result;
    result.x = sol.x;
    result.value = objective.value(result.x);
    result.gap = 0.0;
    result.last_lp = std::move(sol);
    result.lp_was_exact = true;
    return result;
  }

  if (options.use_fw) {
    fw::Objective wrapped{
        [&objective](const std::vector<double>& v) { return objective.value(v); },
        [&objective](const std::vector<double>& v) { return objective.gradient(v); },
    };
    fw::Result r = fw::maximize(wrapped, polytope, std::vector<double>(nv, 0.0),
                                options.fw_config);
    StageSolveResult result;
    result.x = std::move(r.point);
    result.value = r.value;
    result.gap = r.gap;
    return result;
  }

  // --- Secant-segment refinement ----------------------------------------
  // Each convex term is replaced by its piecewise-linear interpolant on a
  // per-term breakpoint set over [base, 1].  A segment is a bounded column
  // (its slope in the objective, its length as the upper bound) hanging off
  // one coupling row per term, so the LP stays small and perfectly
  // conditioned no matter how fine the breakpoints get.  Because secant
  // slopes increase, the LP fills segments in order on its own and the model
  // is exact at breakpoints.
  struct ActiveTerm {
    std::size_t index;          // into objective.terms
    std::vector<double> pts;    // sorted breakpoints, pts.front() == base
  };
  std::vector<ActiveTerm> active;
  for (std::size_t r = 0; r < objective.terms.size(); ++r) {
    const SeparableTerm& term = objective.terms[r];
    if (term.coef == 0.0 || term.weights.empty()) continue;
    double base = clamp_unit(term.base);
    if (base >= 1.0 - kMergeRadius) continue;  // aggregate pinned at 1
    active.push_back({r, {base, 1.0}});
  }

  auto build_model = [&]() {
    SparseLp model = polytope;
    model.c = objective.linear;
    for (const ActiveTerm& at : active) {
      const SeparableTerm& term = objective.terms[at.index];
      int row = model.add_row(0.0);  // sum a.v - sum of segments <= 0
      for (const auto& [var, a] : term.weights) model.set(var, row, a);
      for (std::size_t m = 1; m < at.pts.size(); ++m) {
        double lo = at.pts[m - 1], hi = at.pts[m];
        double slope = big_f_secant(objective.schedule, objective.k, lo, hi);
        int col = model.add_col(-term.coef * slope, hi - lo);
        model.set(col, row, -1.0);
      }
    }
    return model;
  };

  // Insert a breakpoint unless it (nearly) exists; keep the list sorted.
  auto insert_point = [](std::vector<double>& pts, double t) {
    auto it = std::lower_bound(pts.begin(), pts.end(), t);
    if (it != pts.end() && *it - t <= kMergeRadius) return false;
    if (it != pts.begin() && t - *(it - 1) <= kMergeRadius) return false;
    pts.insert(it, t);
    return true;
  };

  SparseLp oracle = polytope;
  StageSolveResult result;
  std::vector<double> best_x;
  double best_gap = std::numeric_limits<double>::infinity();
  for (int round = 0; round < options.max_rounds; ++round) {
    LpSolution sol = checked_solve(build_model());
    std::vector<double> x(sol.x.begin(), sol.x.begin() + nv);

    std::vector<double> grad = objective.gradient(x);
    oracle.c = grad;
    LpSolution vertex = checked_solve(oracle);
    double gap = 0.0;
    for (int i = 0; i < nv; ++i) gap += grad[i] * (vertex.x[i] - x[i]);
    gap = std::max(0.0, gap);
    if (gap < best_gap) {
      best_gap = gap;
      best_x = x;
    }
    if (best_gap <= options.target_gap) break;

    // Refine around each achieved aggregate: make the model exact there and
    // bisect the neighboring segments so kinks cannot trap the iterate.
    bool refined = false;
    for (ActiveTerm& at : active) {
      double t_hat = objective.aggregate(objective.terms[at.index], x);
      t_hat = std::clamp(t_hat, at.pts.front(), 1.0);
      refined = insert_point(at.pts, t_hat) || refined;
      auto above = std::upper_bound(at.pts.begin(), at.pts.end(), t_hat + kMergeRadius);
      if (above != at.pts.end()) {
        refined = insert_point(at.pts, 0.5 * (t_hat + *above)) || refined;
      }
      auto below = std::lower_bound(at.pts.begin(), at.pts.end(), t_hat - kMergeRadius);
      if (below != at.pts.begin()) {
        refined = insert_point(at.pts, 0.5 * (t_hat + *(below - 1))) || refined;
      }
    }
    if (!refined) break;  // resolution exhausted; best_gap is honest
  }
  result.x = std::move(best_x);
  result.gap = best_gap;
  result.value = objective.value(result.x);
  return result;
}

}  // namespace batchalloc::detail
