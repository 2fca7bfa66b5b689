#include "batchalloc/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "batchalloc/rng.hpp"
#include "stage_programs.hpp"
#include "stage_refine.hpp"

namespace batchalloc {
namespace {

using detail::MatchingStageProgram;
using detail::StageDecomposition;
using detail::StageGroup;

void require_valid(const MatchingInstance& instance, Variant expected,
                   const RegularizerSchedule& schedule, const char* op) {
  ValidationReport report = validate(instance);
  if (!report.ok) throw std::invalid_argument("invalid-argument: " + report.error);
  if (instance.variant != expected) {
    throw std::invalid_argument(std::string("invalid-argument: ") + op + " requires a " +
                                variant_name(expected) + " instance");
  }
  if (schedule.K != instance.K) {
    throw std::invalid_argument("invalid-argument: schedule horizon does not match instance");
  }
}

detail::StageSolveOptions map_options(const StageSolverConfig& cfg) {
  detail::StageSolveOptions opts;
  opts.use_fw = cfg.use_fw;
  opts.fw_config = cfg.fw;
  opts.target_gap = cfg.target_gap;
  opts.max_rounds = cfg.max_rounds;
  return opts;
}

double snap_integer(double v, const char* what) {
  double r = std::nearbyint(v);
  if (std::abs(v - r) > 1e-6) {
    throw std::runtime_error(std::string("solver-failure: ") + what +
                             " produced a non-integral value " + std::to_string(v));
  }
  return r;
}

// Rounds one stage's fractional solution group-by-group through the totally
// unimodular counting LP: per-online row sums at most 1, per-offline totals
// between the floor of the within-group fractional total and one above it
// (clamped to the remaining capacity so the rounded stage stays feasible
// even when the fractional total is exactly integral).
std::vector<double> round_bm_stage(const MatchingInstance& instance, int k,
                                   const std::vector<double>& y,
                                   const std::vector<double>& x_frac) {
  const auto& batch = instance.stages[k - 1];
  const int n_online = static_cast<int>(batch.size());
  const int n_offline = instance.num_offline();

  // Canonical variable -> endpoints.
  std::vector<int> var_online, var_offline;
  for (int i = 0; i < n_online; ++i) {
    for (const Edge& e : batch[i].edges) {
      var_online.push_back(i);
      var_offline.push_back(e.j);
    }
  }

  StageDecomposition dec = detail::decompose_matching_stage(instance, k, y, x_frac);
  std::vector<double> x_hat(x_frac.size(), 0.0);

  std::vector<const StageGroup*> groups;
  if (!dec.exhausted.offlines.empty()) groups.push_back(&dec.exhausted);
  for (const StageGroup& g : dec.groups) groups.push_back(&g);

  std::vector<char> in_online(n_online, 0), in_offline(n_offline, 0);
  for (const StageGroup* group : groups) {
    std::fill(in_online.begin(), in_online.end(), 0);
    std::fill(in_offline.begin(), in_offline.end(), 0);
    for (int i : group->onlines) in_online[i] = 1;
    for (int j : group->offlines) in_offline[j] = 1;

    std::vector<int> vars;
    std::vector<double> total(n_offline, 0.0);  // within-group fractional totals
    for (std::size_t v = 0; v < x_frac.size(); ++v) {
      if (in_online[var_online[v]] && in_offline[var_offline[v]]) {
        vars.push_back(static_cast<int>(v));
        total[var_offline[v]] += std::max(0.0, x_frac[v]);
      }
    }
    if (vars.empty()) continue;

    SparseLp lp;
    std::vector<int> online_row(n_online, -1), lower_row(n_offline, -1),
        upper_row(n_offline, -1);
    for (int v : vars) {
      int i = var_online[v], j = var_offline[v];
      if (online_row[i] < 0) online_row[i] = lp.add_row(1.0);
      if (lower_row[j] < 0) {
        double floor_total = std::floor(total[j] + 1e-9);
        double cap = std::max(0.0, instance.offline[j].B - y[j]);
        lower_row[j] = lp.add_row(-floor_total);
        upper_row[j] = lp.add_row(std::min(floor_total + 1.0, cap));
      }
    }
    std::vector<int> col_of_var(x_frac.size(), -1);
    for (int v : vars) {
      int col = lp.add_col(1.0);
      col_of_var[v] = col;
      lp.set(col, online_row[var_online[v]], 1.0);
      lp.set(col, lower_row[var_offline[v]], -1.0);
      lp.set(col, upper_row[var_offline[v]], 1.0);
    }
    LpSolution sol = solve(lp);
    if (sol.status != LpStatus::optimal) {
      throw std::runtime_error("solver-failure: stage rounding program " + sol.note);
    }
    for (int v : vars) x_hat[v] = snap_integer(sol.x[col_of_var[v]], "stage rounding");
  }
  return x_hat;
}

RunTrace run_matching(const MatchingInstance& instance, const StageSolverConfig& cfg,
                      bool integral_bm, std::string algo) {
  RunTrace trace;
  trace.algo = std::move(algo);
  trace.instance = instance;
  std::vector<double> y(instance.num_offline(), 0.0);
  for (int k = 1; k <= instance.K; ++k) {
    MatchingStageProgram prog = detail::build_matching_stage(instance, k, y);
    detail::StageSolveResult r = detail::solve_stage(prog.objective, prog.polytope,
                                                     map_options(cfg));
    StageTrace st;
    st.y_before = y;
    st.fw_gap = r.gap;
    if (r.lp_was_exact) {
      st.lp_exact = true;
      st.last_lp = std::move(r.last_lp);
    }
    std::vector<double> x = std::move(r.x);
    for (double& v : x) v = std::clamp(v, 0.0, 1.0);

    if (integral_bm) {
      st.x_fractional = x;
      if (k == instance.K) {
        // The residual LP is an integral-capacity matching polytope, so the
        // simplex vertex is already integral up to dust.
        for (double& v : x) v = snap_integer(v, "final stage");
      } else {
        x = round_bm_stage(instance, k, y, x);
      }
    }

    double value = 0.0;
    for (std::size_t v = 0; v < x.size(); ++v) {
      value += prog.objective.linear[v] * x[v];
      y[prog.var_offline[v]] += prog.update_coef[v] * x[v];
    }
    for (int j = 0; j < instance.num_offline(); ++j) {
      y[j] = std::clamp(y[j], 0.0, instance.offline[j].B);
      if (integral_bm) y[j] = snap_integer(y[j], "capacity state");
    }
    st.x = std::move(x);
    st.value = value;
    st.y_after = y;
    trace.objective += value;
    trace.fw_gap_max = std::max(trace.fw_gap_max, st.fw_gap);
    trace.stages.push_back(std::move(st));
  }
  return trace;
}

}  // namespace

double default_rho(const MatchingInstance& instance) {
  double b_min = std::numeric_limits<double>::infinity();
  for (const OfflineVertex& off : instance.offline) b_min = std::min(b_min, off.B);
  if (!(b_min > 1.0)) return 0.5;
  return std::min(0.5, std::sqrt(2.0 * std::log(b_min) / b_min));
}

RunTrace pr_mwm(const MatchingInstance& instance, const RegularizerSchedule& schedule,
                const StageSolverConfig& cfg) {
  require_valid(instance, Variant::vwm, schedule, "pr_mwm");
  return run_matching(instance, cfg, false, "pr_mwm");
}

RunTrace pr_mwbm(const MatchingInstance& instance, const RegularizerSchedule& schedule,
                 const StageSolverConfig& cfg, bool integral) {
  require_valid(instance, Variant::bmatching, schedule, "pr_mwbm");
  return run_matching(instance, cfg, integral,
                      integral ? "pr_mwbm_integral" : "pr_mwbm");
}

RunTrace pr_f_adwords(const MatchingInstance& instance, const RegularizerSchedule& schedule,
                      const StageSolverConfig& cfg) {
  require_valid(instance, Variant::adwords, schedule, "pr_f_adwords");
  return run_matching(instance, cfg, false, "pr_f_adwords");
}

RunTrace pr_i_adwords(const MatchingInstance& instance, const RegularizerSchedule& schedule,
                      const StageSolverConfig& cfg, const AdwordsRoundingConfig& rounding) {
  require_valid(instance, Variant::adwords, schedule, "pr_i_adwords");
  if (!(rounding.rho >= 0.0 && rounding.rho < 1.0)) {
    throw std::invalid_argument("invalid-argument: trim factor must lie in [0, 1)");
  }

  MatchingInstance trimmed = instance;
  for (OfflineVertex& off : trimmed.offline) off.B *= 1.0 - rounding.rho;

  RunTrace trace;
  trace.algo = "pr_i_adwords";
  trace.instance = instance;
  trace.rho = rounding.rho;
  trace.seed = rounding.seed;

  std::vector<double> y(instance.num_offline(), 0.0);      // fractional, trimmed
  std::vector<double> spend(instance.num_offline(), 0.0);  // integral, true budgets
  Rng root(rounding.seed);
  int online_base = 0;
  for (int k = 1; k <= instance.K; ++k) {
    MatchingStageProgram prog = detail::build_matching_stage(trimmed, k, y);
    detail::StageSolveResult r = detail::solve_stage(prog.objective, prog.polytope,
                                                     map_options(cfg));
    StageTrace st;
    st.y_before = y;
    st.spend_before = spend;
    st.fw_gap = r.gap;
    if (r.lp_was_exact) {
      st.lp_exact = true;
      st.last_lp = std::move(r.last_lp);
    }
    std::vector<double> x = std::move(r.x);
    for (double& v : x) v = std::clamp(v, 0.0, 1.0);

    // Sample one edge per batch online from its stage distribution; the
    // residual probability mass means "leave unmatched".
    const auto& batch = instance.stages[k - 1];
    const int n_online = static_cast<int>(batch.size());
    st.choice.assign(n_online, -1);
    st.granted.assign(n_online, 0);
    double stage_spend = 0.0;
    {
      std::size_t var = 0;
      for (int i = 0; i < n_online; ++i) {
        Rng stream = root.split(static_cast<std::uint64_t>(k))
                         .split(static_cast<std::uint64_t>(online_base + i));
        double u = stream.next_double();
        double cum = 0.0;
        int chosen = -1;
        for (std::size_t e = 0; e < batch[i].edges.size(); ++e, ++var) {
          cum += x[var];
          if (chosen < 0 && u < cum) chosen = static_cast<int>(var);
        }
        if (chosen < 0) continue;
        st.choice[i] = chosen;
        int j = prog.var_offline[chosen];
        double bid = prog.update_coef[chosen];
        if (spend[j] + bid <= instance.offline[j].B + 1e-12) {
          st.granted[i] = 1;
          spend[j] += bid;
          stage_spend += bid;
        }
      }
    }
    for (std::size_t v = 0; v < x.size(); ++v) {
      y[prog.var_offline[v]] += prog.update_coef[v] * x[v];
    }
    for (int j = 0; j < instance.num_offline(); ++j) {
      y[j] = std::clamp(y[j], 0.0, trimmed.offline[j].B);
    }
    st.x = std::move(x);
    st.value = stage_spend;
    st.y_after = y;
    st.spend_after = spend;
    trace.objective += stage_spend;
    trace.fw_gap_max = std::max(trace.fw_gap_max, st.fw_gap);
    trace.stages.push_back(std::move(st));
    online_base += n_online;
  }
  return trace;
}

}  // namespace batchalloc
