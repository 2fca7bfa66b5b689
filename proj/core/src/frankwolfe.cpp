#include "batchalloc/frankwolfe.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace batchalloc::fw {
namespace {

// Golden-section maximization of a unimodal function on [0, 1]; also probes
// both endpoints so boundary maxima are exact.
template <typename F>
double golden_argmax(const F& h, int iters = 60) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0, b = 1.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = h(x1), f2 = h(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = h(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = h(x1);
    }
  }
  double mid = 0.5 * (a + b);
  double best = mid, best_val = h(mid);
  for (double cand : {0.0, 1.0}) {
    double v = h(cand);
    if (v > best_val) {
      best_val = v;
      best = cand;
    }
  }
  return best;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

Result maximize(const Objective& objective, const SparseLp& polytope,
                const std::vector<double>& start, const Config& cfg) {
  if (cfg.max_iters < 1 || !(cfg.gap_tol > 0.0)) {
    throw std::invalid_argument("invalid-argument: bad frank-wolfe configuration");
  }
  const int n = polytope.cols();
  if (static_cast<int>(start.size()) != n) {
    throw std::invalid_argument("invalid-argument: start point has wrong dimension");
  }
  SparseLp oracle = polytope;
  std::vector<double> x = start;

  auto linear_oracle = [&](const std::vector<double>& grad) {
    oracle.c = grad;
    LpSolution sol = solve(oracle);
    if (sol.status == LpStatus::infeasible) {
      throw std::invalid_argument("invalid-argument: stage polytope is infeasible");
    }
    if (sol.status != LpStatus::optimal) {
      throw std::runtime_error("solver-failure: linear oracle " + sol.note);
    }
    return std::move(sol.x);
  };

  Result result;
  for (int t = 0; t < cfg.max_iters; ++t) {
    std::vector<double> grad = objective.gradient(x);
    for (double g : grad) {
      if (!std::isfinite(g)) throw std::runtime_error("solver-failure: non-finite gradient");
    }
    std::vector<double> vertex = linear_oracle(grad);
    std::vector<double> direction(n);
    for (int i = 0; i < n; ++i) direction[i] = vertex[i] - x[i];
    double gap = dot(grad, direction);
    result.gap = std::max(0.0, gap);
    result.iterations = t;
    if (gap <= cfg.gap_tol) break;

    double step;
    if (cfg.exact_line_search) {
      auto along = [&](double gamma) {
        std::vector<double> probe(n);
        for (int i = 0; i < n; ++i) probe[i] = x[i] + gamma * direction[i];
        return objective.value(probe);
      };
      double here = objective.value(x);
      step = golden_argmax(along);
      if (along(step) <= here) break;  // no progress along the direction
    } else {
      step = 2.0 / (t + 2.0);
    }
    for (int i = 0; i < n; ++i) x[i] += step * direction[i];
    if (t + 1 == cfg.max_iters) {
      // Budget exhausted: measure the gap at the point actually returned.
      std::vector<double> final_grad = objective.gradient(x);
      std::vector<double> final_vertex = linear_oracle(final_grad);
      double final_gap = 0.0;
      for (int i = 0; i < n; ++i) final_gap += final_grad[i] * (final_vertex[i] - x[i]);
      result.gap = std::max(0.0, final_gap);
      result.iterations = cfg.max_iters;
    }
  }
  result.point = std::move(x);
  result.value = objective.value(result.point);
  return result;
}

}  // namespace batchalloc::fw
