#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace batchalloc {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Dense statement of  max c.x  s.t.  A x <= b,  x >= 0.
struct LinearProgram {
  int rows = 0;
  int cols = 0;
  std::vector<double> c;  // size cols
  std::vector<double> b;  // size rows
  std::vector<double> a;  // row-major, rows*cols

  static LinearProgram make(int rows, int cols) {
    LinearProgram lp;
    lp.rows = rows;
    lp.cols = cols;
    lp.c.assign(cols, 0.0);
    lp.b.assign(rows, 0.0);
    lp.a.assign(static_cast<std::size_t>(rows) * cols, 0.0);
    return lp;
  }
  double& at(int r, int col) { return a[static_cast<std::size_t>(r) * cols + col]; }
  double at(int r, int col) const { return a[static_cast<std::size_t>(r) * cols + col]; }
};

// Column-sparse statement of the same problem, with optional per-variable
// upper bounds.  All the programs in this library have 2-5 nonzeros per
// column, and the solver exploits that.
struct SparseLp {
  std::vector<double> c;
  std::vector<double> b;
  std::vector<double> upper;  // per column; kInf when unbounded above
  std::vector<std::vector<std::pair<int, double>>> columns;  // (row, coeff)

  int rows() const { return static_cast<int>(b.size()); }
  int cols() const { return static_cast<int>(c.size()); }
  int add_row(double rhs) {
    b.push_back(rhs);
    return rows() - 1;
  }
  int add_col(double obj, double ub = kInf) {
    c.push_back(obj);
    upper.push_back(ub);
    columns.emplace_back();
    return cols() - 1;
  }
  void set(int col, int row, double coeff) {
    if (coeff != 0.0) columns[col].emplace_back(row, coeff);
  }
};

enum class LpStatus { optimal, infeasible, unbounded, failure };

struct LpSolution {
  LpStatus status = LpStatus::failure;
  double objective = 0.0;
  std::vector<double> x;              // size cols
  std::vector<double> duals;          // size rows, >= 0 at optimal
  std::vector<double> reduced_costs;  // size cols; multiplier of an active
                                      // upper bound when the var sits there
  std::string note;                   // diagnostics on failure
};

struct LpOptions {
  double eps = 1e-8;         // feasibility / optimality tolerance
  double pivot_tol = 1e-10;  // entries below this never pivot
  int max_pivots = 0;        // 0 = 50 * (rows + cols)
};

// Two-phase bounded-variable revised simplex with Dantzig pricing, Bland's
// rule after a degenerate streak, periodic refactorization, and a post-solve
// residual check of primal/dual feasibility, complementary slackness and the
// duality gap.  A result that fails the residual check comes back as
// LpStatus::failure, never as a silently wrong optimum.
LpSolution solve(const SparseLp& lp, const LpOptions& opts = {});
LpSolution solve(const LinearProgram& lp);
LpSolution solve(const LinearProgram& lp, const std::vector<double>& upper,
                 const LpOptions& opts = {});

}  // namespace batchalloc
