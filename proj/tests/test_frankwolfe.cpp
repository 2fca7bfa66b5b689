#include "batchalloc/frankwolfe.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "batchalloc/rng.hpp"
#include "doctest.h"

using namespace batchalloc;

namespace {

SparseLp unit_interval() {
  SparseLp lp;
  lp.add_row(1.0);
  lp.add_col(0.0);
  lp.set(0, 0, 1.0);
  return lp;
}

// One online vertex adjacent to two unit offline vertices.
SparseLp two_offline() {
  SparseLp lp;
  int shared = lp.add_row(1.0);
  int cap0 = lp.add_row(1.0);
  int cap1 = lp.add_row(1.0);
  for (int j = 0; j < 2; ++j) {
    lp.add_col(0.0);
    lp.set(j, shared, 1.0);
    lp.set(j, cap0 + j, 1.0);
  }
  return lp;
}

fw::Objective quadratic_split() {
  return {
      [](const std::vector<double>& y) {
        double v = 0.0;
        for (double yj : y) v += yj - 0.5 * yj * yj;
        return v;
      },
      [](const std::vector<double>& y) {
        std::vector<double> g(y.size());
        for (std::size_t j = 0; j < y.size(); ++j) g[j] = 1.0 - y[j];
        return g;
      },
  };
}

}  // namespace

TEST_CASE("one-dimensional concave maximum on the boundary") {
  fw::Objective obj{
      [](const std::vector<double>& x) { return x[0] - 0.5 * x[0] * x[0]; },
      [](const std::vector<double>& x) { return std::vector<double>{1.0 - x[0]}; },
  };
  fw::Config cfg;
  cfg.max_iters = 200;
  cfg.gap_tol = 1e-10;
  fw::Result r = fw::maximize(obj, unit_interval(), {0.0}, cfg);
  CHECK(r.point[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.value == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(r.gap <= 1e-4);
}

TEST_CASE("shared capacity splits evenly between symmetric sinks") {
  fw::Config cfg;
  cfg.gap_tol = 1e-10;
  fw::Result r = fw::maximize(quadratic_split(), two_offline(), {0.0, 0.0}, cfg);
  // Value-based line search localizes an interior maximum to about the square
  // root of machine epsilon, so 1e-6 is the honest tolerance here.
  CHECK(r.point[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(r.point[1] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(r.value == doctest::Approx(0.75).epsilon(1e-9));
  CHECK(r.gap <= 1e-6);
}

TEST_CASE("linear objectives finish in one oracle call with zero gap") {
  fw::Objective obj{
      [](const std::vector<double>& x) { return 2.0 * x[0] + x[1]; },
      [](const std::vector<double>&) { return std::vector<double>{2.0, 1.0}; },
  };
  fw::Result r = fw::maximize(obj, two_offline(), {0.0, 0.0});
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(r.point[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.gap <= 1e-9);
  CHECK(r.iterations <= 1);
}

TEST_CASE("analytic gradients agree with central differences") {
  fw::Objective obj = quadratic_split();
  Rng rng(5150);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> y = {rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)};
    std::vector<double> g = obj.gradient(y);
    for (int i = 0; i < 2; ++i) {
      double h = 1e-6;
      std::vector<double> up = y, dn = y;
      up[i] += h;
      dn[i] -= h;
      double fd = (obj.value(up) - obj.value(dn)) / (2.0 * h);
      CHECK(std::abs(fd - g[i]) <= 1e-5 * (1.0 + std::abs(g[i])));
    }
  }
}

TEST_CASE("returned points are feasible and within gap of the optimum") {
  Rng rng(882233);
  for (int trial = 0; trial < 25; ++trial) {
    Rng local = rng.split(trial);
    double peak0 = local.uniform(0.1, 1.4);
    double peak1 = local.uniform(0.1, 1.4);
    double cap = local.uniform(0.4, 1.6);
    fw::Objective obj{
        [=](const std::vector<double>& y) {
          return -(y[0] - peak0) * (y[0] - peak0) - (y[1] - peak1) * (y[1] - peak1);
        },
        [=](const std::vector<double>& y) {
          return std::vector<double>{-2.0 * (y[0] - peak0), -2.0 * (y[1] - peak1)};
        },
    };
    SparseLp poly = two_offline();
    poly.b[0] = cap;
    fw::Config cfg;
    cfg.max_iters = 200;
    cfg.gap_tol = 1e-10;
    fw::Result r = fw::maximize(obj, poly, {0.0, 0.0}, cfg);
    CHECK(r.point[0] + r.point[1] <= cap + 1e-9);
    CHECK(r.point[0] >= -1e-12);
    CHECK(r.point[1] >= -1e-12);
    // Dense grid reference for the true optimum.
    double best = -1e100;
    const int steps = 400;
    for (int a = 0; a <= steps; ++a) {
      double y0 = std::min(cap, 1.0) * a / steps;
      double hi = std::min(1.0, cap - y0);
      if (hi < 0.0) continue;
      for (int b = 0; b <= steps; ++b) {
        double y1 = hi * b / steps;
        best = std::max(best, obj.value({y0, y1}));
      }
    }
    CHECK(r.value >= best - r.gap - 1e-6);
  }
}

TEST_CASE("exact line search is monotone in the iteration budget") {
  double prev = -1e100;
  for (int budget = 1; budget <= 6; ++budget) {
    fw::Config cfg;
    cfg.max_iters = budget;
    cfg.gap_tol = 1e-14;
    fw::Result r = fw::maximize(quadratic_split(), two_offline(), {0.0, 0.0}, cfg);
    CHECK(r.value >= prev - 1e-12);
    prev = r.value;
  }
}

TEST_CASE("open-loop steps shrink the gap at the canonical rate") {
  auto gap_after = [&](int iters) {
    fw::Config cfg;
    cfg.max_iters = iters;
    cfg.exact_line_search = false;
    cfg.gap_tol = 1e-15;
    return fw::maximize(quadratic_split(), two_offline(), {0.0, 0.0}, cfg).gap;
  };
  double g20 = gap_after(20);
  double g100 = gap_after(100);
  CHECK(g100 < g20);
  CHECK(g100 <= 2.0 * (20.0 * g20) / 100.0);  // gap ~ C/T with fitted C
}

TEST_CASE("oracle and gradient failures are reported distinctly") {
  SparseLp infeasible;
  infeasible.add_row(-1.0);
  infeasible.add_col(0.0);
  infeasible.set(0, 0, 1.0);
  fw::Objective obj{
      [](const std::vector<double>& x) { return x[0]; },
      [](const std::vector<double>&) { return std::vector<double>{1.0}; },
  };
  CHECK_THROWS_AS(fw::maximize(obj, infeasible, {0.0}), std::invalid_argument);

  fw::Objective bad_grad{
      [](const std::vector<double>& x) { return x[0]; },
      [](const std::vector<double>&) {
        return std::vector<double>{std::numeric_limits<double>::quiet_NaN()};
      },
  };
  CHECK_THROWS_AS(fw::maximize(bad_grad, unit_interval(), {0.0}), std::runtime_error);

  fw::Config bad_cfg;
  bad_cfg.max_iters = 0;
  CHECK_THROWS_AS(fw::maximize(obj, unit_interval(), {0.0}, bad_cfg), std::invalid_argument);
}
