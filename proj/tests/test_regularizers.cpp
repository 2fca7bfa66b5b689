#include "batchalloc/regularizers.hpp"

#include <cmath>
#include <stdexcept>

#include "batchalloc/rng.hpp"
#include "doctest.h"

using batchalloc::big_f;
using batchalloc::f;
using batchalloc::gamma;
using batchalloc::recursion_maximizer;
using batchalloc::RegularizerSchedule;

namespace {

// Independent quadrature oracle: composite Simpson of f_k over [0, x].
double simpson_of_f(const RegularizerSchedule& s, int k, double x, int panels) {
  if (x == 0.0) return 0.0;
  double h = x / (2 * panels);
  double acc = f(s, k, 0.0) + f(s, k, x);
  for (int i = 1; i < 2 * panels; ++i) {
    acc += (i % 2 == 1 ? 4.0 : 2.0) * f(s, k, i * h);
  }
  return acc * h / 3.0;
}

}  // namespace

TEST_CASE("gamma constants") {
  CHECK(gamma(1) == 1.0);
  CHECK(gamma(2) == 0.75);
  CHECK(gamma(3) == 19.0 / 27.0);
  CHECK_THROWS_AS(gamma(0), std::invalid_argument);
}

TEST_CASE("gamma decreases strictly toward 1 - 1/e") {
  const double limit = 1.0 - std::exp(-1.0);
  double prev = gamma(1);
  for (int K = 2; K <= 1000; ++K) {
    double g = gamma(K);
    CHECK(g < prev);
    CHECK(g > limit);
    prev = g;
  }
}

TEST_CASE("f closed-form spot values") {
  // Second-to-last stage is the identity.
  CHECK(f({4}, 3, 0.37) == doctest::Approx(0.37).epsilon(1e-15));
  // (1 - 0.5/2)^2 = 0.5625, exactly representable.
  CHECK(f({3}, 1, 0.5) == 0.5625);
  // Last stage is the indicator of x == 1.
  CHECK(f({5}, 5, 0.999) == 0.0);
  CHECK(f({5}, 5, 1.0) == 1.0);
}

TEST_CASE("f domain errors") {
  CHECK_THROWS_AS(f({3}, 0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(f({3}, 4, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(f({3}, 1, -0.2), std::invalid_argument);
  CHECK_THROWS_AS(f({3}, 1, 1.2), std::invalid_argument);
}

TEST_CASE("f range and monotonicity invariants") {
  for (int K = 1; K <= 8; ++K) {
    RegularizerSchedule s{K};
    for (int k = 1; k <= K; ++k) {
      CHECK(f(s, k, 1.0) == 1.0);
      double prev = -1.0;
      for (int i = 0; i <= 400; ++i) {
        double x = i / 400.0;
        double v = f(s, k, x);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        if (k < K) {
          CHECK(v >= prev);  // nondecreasing for polynomial stages
          prev = v;
        }
      }
    }
  }
}

TEST_CASE("f is dominated by exp(x-1)") {
  batchalloc::Rng rng(2024);
  for (int K = 1; K <= 10; ++K) {
    RegularizerSchedule s{K};
    for (int trial = 0; trial < 500; ++trial) {
      int k = 1 + static_cast<int>(rng.next_below(K));
      double x = rng.next_double();
      CHECK(f(s, k, x) <= std::exp(x - 1.0) + 1e-12);
    }
  }
}

TEST_CASE("big_f frozen values") {
  // Integral of f_1(y) = y over [0,1] is 1/2.
  CHECK(big_f({2}, 1, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  // Last stage integrates to zero everywhere.
  CHECK(big_f({6}, 6, 0.7) == 0.0);
  CHECK(big_f({4}, 1, 0.0) == 0.0);
}

TEST_CASE("big_f matches Simpson quadrature of f") {
  for (int K = 2; K <= 8; ++K) {
    RegularizerSchedule s{K};
    for (int k = 1; k < K; ++k) {
      for (int i = 0; i <= 20; ++i) {
        double x = i / 20.0;
        CHECK(std::abs(big_f(s, k, x) - simpson_of_f(s, k, x, 400)) <= 1e-9);
      }
    }
  }
}

TEST_CASE("big_f is convex (nondecreasing integrand)") {
  RegularizerSchedule s{5};
  for (int k = 1; k < 5; ++k) {
    double prev_slope = -1.0;
    for (int i = 0; i < 100; ++i) {
      double a = i / 100.0, b = (i + 1) / 100.0;
      double slope = (big_f(s, k, b) - big_f(s, k, a)) / (b - a);
      CHECK(slope >= prev_slope - 1e-12);
      prev_slope = slope;
    }
  }
}

TEST_CASE("recursion_maximizer frozen values") {
  // K=3, k=2: maximize (1-y) f_3(0.4+y); the maximizer pushes the argument to
  // exactly 1 where the indicator pays 1, so y* = 0.6 and value = 0.4.
  auto r = recursion_maximizer({3}, 2, 0.4);
  CHECK(r.y_star == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(r.value == doctest::Approx(0.4).epsilon(1e-12));

  // Degenerate interval at x = 1.
  auto r2 = recursion_maximizer({2}, 1, 1.0);
  CHECK(r2.y_star == 0.0);
  CHECK(r2.value == 1.0);

  // K=4, k=1, x=0: y* = 1/3 and value (2/3)*(2/3)^2 = 8/27.
  auto r3 = recursion_maximizer({4}, 1, 0.0);
  CHECK(r3.y_star == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(r3.value == doctest::Approx(8.0 / 27.0).epsilon(1e-14));

  CHECK_THROWS_AS(recursion_maximizer({3}, 3, 0.2), std::invalid_argument);
}

TEST_CASE("recursion_maximizer agrees with dense grid search") {
  for (int K = 2; K <= 6; ++K) {
    RegularizerSchedule s{K};
    for (int k = 1; k < K; ++k) {
      for (int xi = 0; xi <= 10; ++xi) {
        double x = xi / 10.0;
        auto r = recursion_maximizer(s, k, x);
        // Dense 1-D search oracle over y in [0, 1-x].
        double best = -1.0, best_y = 0.0;
        const int n = 4000;
        for (int i = 0; i <= n; ++i) {
          double y = (1.0 - x) * i / n;
          double arg = x + y;
          double v = (1.0 - y) * f(s, k + 1, arg > 1.0 ? 1.0 : arg);
          if (v > best) {
            best = v;
            best_y = y;
          }
        }
        CHECK(r.value >= best - 1e-9);
        CHECK(std::abs(r.value - f(s, k, x)) <= 1e-12);
        if (k + 1 < K) {
          // Smooth inner stage: grid argmax should be near the closed form.
          CHECK(std::abs(best_y - r.y_star) <= 1.5 * (1.0 - x) / n + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("recursion identity on a fine grid (all stages)") {
  for (int K = 2; K <= 8; ++K) {
    RegularizerSchedule s{K};
    for (int k = 1; k < K; ++k) {
      for (int xi = 0; xi <= 1000; ++xi) {
        double x = xi / 1000.0;
        double target = f(s, k, x);
        double got = recursion_maximizer(s, k, x).value;
        REQUIRE(std::abs(got - target) <= 1e-9);
      }
    }
  }
}

TEST_CASE("worst point of 1-(1-x)f_1(x) equals gamma") {
  for (int K = 1; K <= 10; ++K) {
    RegularizerSchedule s{K};
    double best = 2.0;
    // Uniform grid plus the analytic minimizer x = 1/K (a uniform grid alone
    // can miss the minimum by more than the comparison tolerance).
    for (int i = 0; i <= 1000; ++i) {
      double x = i / 1000.0;
      best = std::min(best, 1.0 - (1.0 - x) * f(s, 1, x));
    }
    best = std::min(best, 1.0 - (1.0 - 1.0 / K) * f(s, 1, 1.0 / K));
    CHECK(std::abs(best - gamma(K)) <= 1e-9);
  }
}

TEST_CASE("secant slopes of the primitive match difference quotients") {
  for (int K : {2, 3, 5, 8}) {
    RegularizerSchedule s{K};
    for (int k = 1; k < K; ++k) {
      for (int i = 0; i < 10; ++i) {
        double lo = i / 10.0;
        double hi = lo + 0.07;
        double quotient = (big_f(s, k, hi) - big_f(s, k, lo)) / (hi - lo);
        CHECK(std::abs(big_f_secant(s, k, lo, hi) - quotient) <= 1e-12);
        // Mean value theorem: the slope lies between the endpoint densities.
        CHECK(big_f_secant(s, k, lo, hi) >= f(s, k, lo) - 1e-12);
        CHECK(big_f_secant(s, k, lo, hi) <= f(s, k, hi) + 1e-12);
      }
    }
  }
}

TEST_CASE("secant slopes stay exact on vanishing segments") {
  RegularizerSchedule s{4};
  for (int k = 1; k < 4; ++k) {
    for (double t : {0.0, 0.3, 0.7, 1.0 - 1e-12, 1.0}) {
      CHECK(big_f_secant(s, k, t, t) == doctest::Approx(f(s, k, t)).epsilon(1e-14));
      if (t + 1e-12 <= 1.0) {
        // A naive difference quotient loses ~10 digits here; the closed form
        // must stay glued to the density.
        CHECK(std::abs(big_f_secant(s, k, t, t + 1e-12) - f(s, k, t)) <= 1e-11);
      }
    }
  }
}

TEST_CASE("secant slope argument validation") {
  RegularizerSchedule s{3};
  CHECK_THROWS_AS(big_f_secant(s, 3, 0.1, 0.2), std::invalid_argument);  // last stage
  CHECK_THROWS_AS(big_f_secant(s, 1, 0.5, 0.2), std::invalid_argument);  // reversed
  CHECK_THROWS_AS(big_f_secant(s, 1, -0.5, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(big_f_secant(s, 0, 0.1, 0.2), std::invalid_argument);
}
