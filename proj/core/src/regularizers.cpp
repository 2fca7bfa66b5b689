#include "batchalloc/regularizers.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace batchalloc {

namespace {

// Arguments may carry rounding dust from accumulated sums; accept a hair of
// slop and clamp, reject anything clearly out of range.
double checked_unit(double x, const char* what) {
  constexpr double slop = 1e-9;
  if (!(x >= -slop && x <= 1.0 + slop)) {
    throw std::invalid_argument(std::string(what) + " outside [0,1]: " +
                                std::to_string(x));
  }
  return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x);
}

void check_stage(const RegularizerSchedule& s, int k) {
  if (s.K < 1) throw std::invalid_argument("schedule needs K >= 1");
  if (k < 1 || k > s.K) {
    throw std::invalid_argument("stage index " + std::to_string(k) +
                                " outside [1," + std::to_string(s.K) + "]");
  }
}

}  // namespace

double pow_int(double base, int exp) {
  if (exp < 0) throw std::invalid_argument("pow_int: negative exponent");
  double result = 1.0;
  double b = base;
  for (int e = exp; e > 0; e >>= 1) {
    if (e & 1) result *= b;
    b *= b;
  }
  return result;
}

double gamma(int K) {
  if (K < 1) throw std::invalid_argument("gamma: K must be >= 1");
  // For small K, (K-1)^K and K^K fit in 64 bits; forming the ratio from exact
  // integers gives the correctly rounded value of (1-1/K)^K, which matters for
  // spot checks like gamma(3) == 19/27.
  if (K <= 15) {
    auto ipow = [](std::uint64_t b, int e) {
      std::uint64_t r = 1;
      for (int i = 0; i < e; ++i) r *= b;
      return r;
    };
    return 1.0 - static_cast<double>(ipow(K - 1, K)) / static_cast<double>(ipow(K, K));
  }
  return 1.0 - pow_int(1.0 - 1.0 / K, K);
}

double f(const RegularizerSchedule& s, int k, double x) {
  check_stage(s, k);
  x = checked_unit(x, "f argument");
  if (k == s.K) return std::abs(x - 1.0) <= kEqTol ? 1.0 : 0.0;
  int m = s.K - k;
  return pow_int(1.0 - (1.0 - x) / m, m);
}

double big_f(const RegularizerSchedule& s, int k, double x) {
  check_stage(s, k);
  x = checked_unit(x, "big_f argument");
  if (k == s.K) return 0.0;
  int m = s.K - k;
  double at_x = pow_int(1.0 - (1.0 - x) / m, m + 1);
  double at_0 = pow_int(1.0 - 1.0 / m, m + 1);
  return static_cast<double>(m) / (m + 1) * (at_x - at_0);
}

double big_f_secant(const RegularizerSchedule& s, int k, double lo, double hi) {
  check_stage(s, k);
  if (k == s.K) throw std::invalid_argument("big_f_secant: needs a stage before the last");
  lo = checked_unit(lo, "big_f_secant lower point");
  hi = checked_unit(hi, "big_f_secant upper point");
  if (lo > hi) throw std::invalid_argument("big_f_secant: lower point above upper");
  // With u, v the shifted arguments, F_k(hi) - F_k(lo) factors as
  // m/(m+1) * (u - v) * sum_i u^i v^(m-i) and u - v == (hi - lo)/m, so the
  // difference quotient reduces to the power sum below.  Evaluating it this
  // way avoids the cancellation that a direct F difference suffers on short
  // segments, and it equals f_k(lo) exactly when hi == lo.
  int m = s.K - k;
  double u = 1.0 - (1.0 - hi) / m;
  double v = 1.0 - (1.0 - lo) / m;
  std::vector<double> vpow(m + 1, 1.0);
  for (int i = 1; i <= m; ++i) vpow[i] = vpow[i - 1] * v;
  double sum = 0.0;
  double upow = 1.0;
  for (int i = 0; i <= m; ++i) {
    sum += upow * vpow[m - i];
    upow *= u;
  }
  return sum / (m + 1);
}

RecursionPoint recursion_maximizer(const RegularizerSchedule& s, int k, double x) {
  check_stage(s, k);
  if (k == s.K) {
    throw std::invalid_argument("recursion_maximizer: needs a stage before the last");
  }
  x = checked_unit(x, "recursion_maximizer argument");
  double y_star = (1.0 - x) / (s.K - k);
  double arg = x + y_star;
  if (arg > 1.0) arg = 1.0;
  return RecursionPoint{y_star, (1.0 - y_star) * f(s, k + 1, arg)};
}

}  // namespace batchalloc
