#pragma once

namespace batchalloc {

// The stage-indexed family of polynomial regularizers used by all multi-stage
// allocation algorithms in this library.  For a horizon of K batches the
// stage-k regularizer is
//
//   f_k(x) = (1 - (1-x)/(K-k))^(K-k)      for k < K,
//   f_K(x) = 1{x == 1}                    (indicator, tolerance kEqTol),
//
// with primitive F_k(x) = integral of f_k over [0, x] in closed form and
// F_K == 0.  The family satisfies the backward recursion
// f_k(x) = max_{y in [0,1-x]} (1-y) f_{k+1}(x+y), maximized at
// y* = (1-x)/(K-k), and pins the guarantee gamma(K) = 1 - (1-1/K)^K.
struct RegularizerSchedule {
  int K = 1;
};

// Equality tolerance for the stage-K indicator regularizer.
inline constexpr double kEqTol = 1e-12;

// 1 - (1 - 1/K)^K.  Throws std::invalid_argument for K < 1.
double gamma(int K);

// f_k(x) for k in [1, K], x in [0, 1].  Throws std::invalid_argument on a
// stage or argument out of range.
double f(const RegularizerSchedule& s, int k, double x);

// F_k(x) = integral of f_k over [0, x]; F_K == 0.
double big_f(const RegularizerSchedule& s, int k, double x);

// Exact secant slope (F_k(hi) - F_k(lo)) / (hi - lo), evaluated in a
// cancellation-free closed form so it stays accurate for segments of any
// length; hi == lo degenerates to f_k(lo).  Requires 0 <= lo <= hi <= 1
// and k < K.
double big_f_secant(const RegularizerSchedule& s, int k, double lo, double hi);

struct RecursionPoint {
  double y_star = 0.0;
  double value = 0.0;
};

// The maximizer y* = (1-x)/(K-k) of (1-y) f_{k+1}(x+y) over y in [0, 1-x],
// together with the attained value (which equals f_k(x)).  Requires k < K.
RecursionPoint recursion_maximizer(const RegularizerSchedule& s, int k, double x);

// Integer power by repeated squaring; keeps evaluation independent of libm
// pow() so results are bit-stable across toolchains.
double pow_int(double base, int exp);

}  // namespace batchalloc
