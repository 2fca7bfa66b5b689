#include "batchalloc/simplex.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace batchalloc {
namespace {

enum class VarState : unsigned char { at_lower, at_upper, basic };

// Internal column layout: [0, n) structural, [n, n+m) slacks, then one
// artificial per row whose right-hand side is negative.
class RevisedSimplex {
 public:
  RevisedSimplex(const SparseLp& lp, const LpOptions& opts)
      : lp_(lp), opts_(opts), m_(lp.rows()), n_(lp.cols()) {
    if (static_cast<int>(lp.c.size()) != n_ || static_cast<int>(lp.upper.size()) != n_ ||
        static_cast<int>(lp.columns.size()) != n_) {
      throw std::invalid_argument("invalid-argument: inconsistent program dimensions");
    }
    for (const auto& col : lp.columns) {
      for (const auto& [r, v] : col) {
        if (r < 0 || r >= m_ || !std::isfinite(v)) {
          throw std::invalid_argument("invalid-argument: bad matrix entry");
        }
      }
    }
    for (double v : lp.b) {
      if (!std::isfinite(v)) throw std::invalid_argument("invalid-argument: bad rhs");
    }
    for (double v : lp.c) {
      if (!std::isfinite(v)) throw std::invalid_argument("invalid-argument: bad objective");
    }
    for (double v : lp.upper) {
      if (std::isnan(v) || v < 0.0) {
        throw std::invalid_argument("invalid-argument: negative upper bound");
      }
    }
    if (opts_.max_pivots <= 0) opts_.max_pivots = 50 * (m_ + n_) + 200;
    build_columns();
  }

  LpSolution run() {
    LpSolution sol;
    init_basis();
    if (num_artificial_ > 0) {
      phase_ = 1;
      LoopResult r = iterate();
      if (r == LoopResult::pivot_limit) return fail("pivot limit in phase 1");
      if (r == LoopResult::unbounded) return fail("phase 1 reported unbounded");
      refactor();
      double infeas = 0.0;
      for (int i = 0; i < m_; ++i) {
        if (basis_[i] >= first_artificial_) infeas += std::max(0.0, xb_[i]);
      }
      if (infeas > opts_.eps * (1.0 + b_scale_)) {
        sol.status = LpStatus::infeasible;
        return sol;
      }
      expel_artificials();
      // Pin every artificial to zero so phase 2 can never reuse one.
      for (int j = first_artificial_; j < total_; ++j) upper_[j] = 0.0;
    }
    phase_ = 2;
    bland_ = false;
    degenerate_streak_ = 0;
    LoopResult r = iterate();
    if (r == LoopResult::pivot_limit) return fail("pivot limit in phase 2");
    if (r == LoopResult::unbounded) {
      sol.status = LpStatus::unbounded;
      return sol;
    }
    return extract();
  }

 private:
  enum class LoopResult { optimal, unbounded, pivot_limit };

  void build_columns() {
    first_slack_ = n_;
    first_artificial_ = n_ + m_;
    num_artificial_ = 0;
    for (int i = 0; i < m_; ++i) {
      if (lp_.b[i] < 0.0) ++num_artificial_;
    }
    total_ = n_ + m_ + num_artificial_;
    cols_.resize(total_);
    upper_.assign(total_, kInf);
    cost_.assign(total_, 0.0);
    for (int j = 0; j < n_; ++j) {
      cols_[j] = lp_.columns[j];
      upper_[j] = lp_.upper[j];
      cost_[j] = lp_.c[j];
    }
    for (int i = 0; i < m_; ++i) {
      cols_[first_slack_ + i] = {{i, 1.0}};
    }
    art_row_.clear();
    int a = first_artificial_;
    for (int i = 0; i < m_; ++i) {
      if (lp_.b[i] < 0.0) {
        cols_[a] = {{i, -1.0}};
        art_row_.push_back(i);
        ++a;
      }
    }
    b_scale_ = 0.0;
    for (double v : lp_.b) b_scale_ = std::max(b_scale_, std::abs(v));
    c_scale_ = 0.0;
    for (double v : lp_.c) c_scale_ = std::max(c_scale_, std::abs(v));
  }

  void init_basis() {
    state_.assign(total_, VarState::at_lower);
    basis_.assign(m_, -1);
    int a = first_artificial_;
    for (int i = 0; i < m_; ++i) {
      if (lp_.b[i] < 0.0) {
        basis_[i] = a++;
      } else {
        basis_[i] = first_slack_ + i;
      }
      state_[basis_[i]] = VarState::basic;
    }
    binv_ = Eigen::MatrixXd::Identity(m_, m_);
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] >= first_artificial_) binv_(i, i) = -1.0;
    }
    recompute_xb();
    pivots_ = 0;
    since_refactor_ = 0;
    bland_ = false;
    degenerate_streak_ = 0;
  }

  double cost_of(int j) const {
    if (phase_ == 1) return j >= first_artificial_ ? -1.0 : 0.0;
    return j >= n_ ? 0.0 : cost_[j];
  }

  // Effective right-hand side once nonbasic-at-upper columns are folded in.
  void recompute_xb() {
    Eigen::VectorXd rhs(m_);
    for (int i = 0; i < m_; ++i) rhs[i] = lp_.b[i];
    for (int j = 0; j < total_; ++j) {
      if (state_[j] == VarState::at_upper && upper_[j] != 0.0) {
        for (const auto& [r, v] : cols_[j]) rhs[r] -= v * upper_[j];
      }
    }
    xb_ = binv_ * rhs;
  }

  void refactor() {
    Eigen::MatrixXd basis_mat = Eigen::MatrixXd::Zero(m_, m_);
    for (int i = 0; i < m_; ++i) {
      for (const auto& [r, v] : cols_[basis_[i]]) basis_mat(r, i) += v;
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_mat);
    binv_ = lu.inverse();
    recompute_xb();
    since_refactor_ = 0;
  }

  Eigen::VectorXd dual_vector() const {
    Eigen::VectorXd cb(m_);
    for (int i = 0; i < m_; ++i) cb[i] = cost_of(basis_[i]);
    return binv_.transpose() * cb;
  }

  double reduced_cost(int j, const Eigen::VectorXd& y) const {
    double d = cost_of(j);
    for (const auto& [r, v] : cols_[j]) d -= y[r] * v;
    return d;
  }

  // Entering step direction is +1 when leaving the lower bound, -1 when
  // leaving the upper bound; the objective improves iff sigma * d_j > 0.
  LoopResult iterate() {
    const double enter_tol = opts_.eps * (1.0 + (phase_ == 1 ? 1.0 : c_scale_));
    for (;;) {
      if (since_refactor_ >= 64) refactor();
      Eigen::VectorXd y = dual_vector();
      int enter = -1;
      double enter_sigma = 0.0;
      double best_score = enter_tol;
      for (int j = 0; j < total_; ++j) {
        if (state_[j] == VarState::basic) continue;
        if (phase_ == 2 && j >= first_artificial_) continue;
        if (upper_[j] == 0.0) continue;  // fixed at zero
        double d = reduced_cost(j, y);
        double sigma;
        if (state_[j] == VarState::at_lower) {
          if (d <= enter_tol) continue;
          sigma = 1.0;
        } else {
          if (d >= -enter_tol) continue;
          sigma = -1.0;
        }
        if (bland_) {
          enter = j;
          enter_sigma = sigma;
          break;
        }
        double score = std::abs(d);
        if (score > best_score) {
          best_score = score;
          enter = j;
          enter_sigma = sigma;
        }
      }
      if (enter < 0) return LoopResult::optimal;

      // alpha = B^{-1} A_enter, assembled from the sparse column.
      Eigen::VectorXd alpha = Eigen::VectorXd::Zero(m_);
      for (const auto& [r, v] : cols_[enter]) alpha += v * binv_.col(r);

      // Ratio test: the step stops where a basic variable hits a bound or
      // where the entering variable flips to its own opposite bound;
      // leave_row == -1 means the flip (or an unbounded ray if best_t stays
      // infinite).  Near-ties prefer a basis change; among tied rows Bland's
      // rule picks the lowest variable index.
      double best_t = upper_[enter] == kInf ? kInf : upper_[enter];
      int leave_row = -1;
      bool leave_at_upper = false;
      for (int i = 0; i < m_; ++i) {
        double delta = enter_sigma * alpha[i];  // x_Bi moves by -t*delta
        double t;
        bool hits_upper;
        if (delta > opts_.pivot_tol) {
          t = std::max(0.0, xb_[i]) / delta;
          hits_upper = false;
        } else if (delta < -opts_.pivot_tol && upper_[basis_[i]] != kInf) {
          t = std::max(0.0, upper_[basis_[i]] - xb_[i]) / (-delta);
          hits_upper = true;
        } else {
          continue;
        }
        bool better;
        if (leave_row < 0) {
          better = t <= best_t + 1e-12;
        } else if (t < best_t - 1e-12) {
          better = true;
        } else if (t <= best_t + 1e-12) {
          better = bland_ && basis_[i] < basis_[leave_row];
        } else {
          better = false;
        }
        if (better) {
          best_t = std::min(best_t, t);
          leave_row = i;
          leave_at_upper = hits_upper;
        }
      }

      if (best_t == kInf) {
        return phase_ == 2 ? LoopResult::unbounded : LoopResult::pivot_limit;
      }
      double t = std::max(0.0, best_t);
      if (++pivots_ > opts_.max_pivots) return LoopResult::pivot_limit;
      if (t <= 1e-11) {
        if (++degenerate_streak_ >= 30) bland_ = true;
      } else {
        degenerate_streak_ = 0;
      }

      if (leave_row < 0) {
        // Bound flip: the entering variable traverses its whole range.
        xb_ -= enter_sigma * upper_[enter] * alpha;
        state_[enter] = state_[enter] == VarState::at_lower ? VarState::at_upper
                                                           : VarState::at_lower;
        ++since_refactor_;
        continue;
      }

      double enter_value =
          (enter_sigma > 0.0 ? 0.0 : upper_[enter]) + enter_sigma * t;
      xb_ -= enter_sigma * t * alpha;
      int leaving = basis_[leave_row];
      state_[leaving] = leave_at_upper ? VarState::at_upper : VarState::at_lower;
      basis_[leave_row] = enter;
      state_[enter] = VarState::basic;
      xb_[leave_row] = enter_value;

      double pivot_elem = alpha[leave_row];
      if (std::abs(pivot_elem) < opts_.pivot_tol) {
        refactor();
        continue;
      }
      binv_.row(leave_row) /= pivot_elem;
      for (int i = 0; i < m_; ++i) {
        if (i == leave_row) continue;
        double factor = alpha[i];
        if (factor != 0.0) binv_.row(i) -= factor * binv_.row(leave_row);
      }
      ++since_refactor_;
    }
  }

  // Replace any artificial still basic (at value ~0) by a structural or slack
  // column; rows admitting none are redundant and keep a pinned artificial.
  void expel_artificials() {
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < first_artificial_) continue;
      int replacement = -1;
      double best = opts_.pivot_tol;
      for (int j = 0; j < first_artificial_; ++j) {
        if (state_[j] == VarState::basic) continue;
        double alpha_i = 0.0;
        for (const auto& [r, v] : cols_[j]) alpha_i += v * binv_(i, r);
        if (std::abs(alpha_i) > best) {
          best = std::abs(alpha_i);
          replacement = j;
        }
      }
      if (replacement < 0) continue;
      Eigen::VectorXd alpha = Eigen::VectorXd::Zero(m_);
      for (const auto& [r, v] : cols_[replacement]) alpha += v * binv_.col(r);
      int old = basis_[i];
      state_[old] = VarState::at_lower;
      basis_[i] = replacement;
      state_[replacement] = VarState::basic;
      binv_.row(i) /= alpha[i];
      for (int r = 0; r < m_; ++r) {
        if (r == i) continue;
        double factor = alpha[r];
        if (factor != 0.0) binv_.row(r) -= factor * binv_.row(i);
      }
      // The swap is degenerate (the artificial sat at zero), so the primal
      // point is unchanged; recompute basic values under the new basis.
      recompute_xb();
      ++since_refactor_;
    }
  }

  LpSolution extract() {
    refactor();
    Eigen::VectorXd y = dual_vector();
    LpSolution sol;
    sol.x.assign(n_, 0.0);
    sol.duals.assign(m_, 0.0);
    sol.reduced_costs.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j) {
      if (state_[j] == VarState::at_upper) sol.x[j] = upper_[j];
    }
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n_) sol.x[basis_[i]] = xb_[i];
    }
    for (int j = 0; j < n_; ++j) {
      sol.x[j] = std::clamp(sol.x[j], 0.0, upper_[j]);
      sol.reduced_costs[j] = reduced_cost(j, y);
    }
    for (int i = 0; i < m_; ++i) sol.duals[i] = std::max(0.0, y[i]);
    sol.objective = 0.0;
    for (int j = 0; j < n_; ++j) sol.objective += lp_.c[j] * sol.x[j];
    return certify(sol, y);
  }

  // Residual check against the original data; no tableau quantity is trusted.
  LpSolution certify(LpSolution sol, const Eigen::VectorXd& y) {
    const double feas_tol = 100.0 * opts_.eps * (1.0 + b_scale_);
    const double dual_tol = 100.0 * opts_.eps * (1.0 + c_scale_ + b_scale_);
    std::vector<double> activity(m_, 0.0);
    for (int j = 0; j < n_; ++j) {
      if (sol.x[j] == 0.0) continue;
      for (const auto& [r, v] : lp_.columns[j]) activity[r] += v * sol.x[j];
    }
    for (int i = 0; i < m_; ++i) {
      if (activity[i] > lp_.b[i] + feas_tol) {
        return fail("primal row residual " + std::to_string(activity[i] - lp_.b[i]));
      }
      if (y[i] < -dual_tol) return fail("negative row dual");
      double slack = lp_.b[i] - activity[i];
      if (sol.duals[i] * std::max(0.0, slack) > dual_tol * (1.0 + std::abs(lp_.b[i]))) {
        return fail("complementary slackness violated on row " + std::to_string(i));
      }
    }
    double dual_obj = 0.0;
    for (int i = 0; i < m_; ++i) dual_obj += sol.duals[i] * lp_.b[i];
    for (int j = 0; j < n_; ++j) {
      double d = sol.reduced_costs[j];
      switch (state_[j]) {
        case VarState::at_lower:
          if (d > dual_tol) return fail("reduced cost positive at lower bound");
          break;
        case VarState::at_upper:
          if (d < -dual_tol) return fail("reduced cost negative at upper bound");
          dual_obj += d * upper_[j];
          break;
        case VarState::basic:
          if (std::abs(d) > dual_tol) return fail("nonzero basic reduced cost");
          break;
      }
    }
    double gap_scale = 1.0 + std::abs(sol.objective) + std::abs(dual_obj);
    if (std::abs(sol.objective - dual_obj) > 100.0 * opts_.eps * gap_scale) {
      return fail("duality gap " + std::to_string(sol.objective - dual_obj));
    }
    sol.status = LpStatus::optimal;
    return sol;
  }

  LpSolution fail(std::string why) {
    LpSolution sol;
    sol.status = LpStatus::failure;
    sol.note = std::move(why);
    return sol;
  }

  SparseLp lp_;
  LpOptions opts_;
  int m_ = 0;
  int n_ = 0;
  int total_ = 0;
  int first_slack_ = 0;
  int first_artificial_ = 0;
  int num_artificial_ = 0;
  double b_scale_ = 0.0;
  double c_scale_ = 0.0;
  int phase_ = 2;
  std::vector<std::vector<std::pair<int, double>>> cols_;
  std::vector<double> upper_;
  std::vector<double> cost_;
  std::vector<int> art_row_;
  std::vector<int> basis_;
  std::vector<VarState> state_;
  Eigen::MatrixXd binv_;
  Eigen::VectorXd xb_;
  int pivots_ = 0;
  int since_refactor_ = 0;
  bool bland_ = false;
  int degenerate_streak_ = 0;
};

}  // namespace

LpSolution solve(const SparseLp& lp, const LpOptions& opts) {
  if (lp.rows() == 0 && lp.cols() == 0) {
    LpSolution sol;
    sol.status = LpStatus::optimal;
    return sol;
  }
  RevisedSimplex simplex(lp, opts);
  return simplex.run();
}

LpSolution solve(const LinearProgram& lp) {
  return solve(lp, std::vector<double>(lp.cols, kInf), LpOptions{});
}

LpSolution solve(const LinearProgram& lp, const std::vector<double>& upper,
                 const LpOptions& opts) {
  if (static_cast<int>(lp.c.size()) != lp.cols ||
      static_cast<int>(lp.b.size()) != lp.rows ||
      lp.a.size() != static_cast<std::size_t>(lp.rows) * lp.cols ||
      static_cast<int>(upper.size()) != lp.cols) {
    throw std::invalid_argument("invalid-argument: inconsistent program dimensions");
  }
  SparseLp sparse;
  for (int i = 0; i < lp.rows; ++i) sparse.add_row(lp.b[i]);
  for (int j = 0; j < lp.cols; ++j) {
    sparse.add_col(lp.c[j], upper[j]);
    for (int i = 0; i < lp.rows; ++i) {
      sparse.set(j, i, lp.at(i, j));
    }
  }
  return solve(sparse, opts);
}

}  // namespace batchalloc
