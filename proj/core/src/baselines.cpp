#include "batchalloc/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <variant>

#include "batchalloc/simplex.hpp"
#include "mca_program.hpp"
#include "stage_programs.hpp"
#include "stage_refine.hpp"

namespace batchalloc {
namespace {

void require_valid(const Instance& instance) {
  ValidationReport report = validate(instance);
  if (!report.ok) throw std::invalid_argument("invalid-argument: " + report.error);
}

LpSolution solve_or_throw(const SparseLp& lp, const char* what) {
  LpSolution sol = solve(lp);
  if (sol.status != LpStatus::optimal) {
    throw std::runtime_error(std::string("solver-failure: ") + what + " (" + sol.note + ")");
  }
  return sol;
}

bool is_normalized(const McaInstance& instance) {
  for (const auto& adv : instance.advertisers) {
    if (adv.n != 1.0) return false;
  }
  return true;
}

// --- offline optima --------------------------------------------------------

OfflineOptimum offline_matching(const MatchingInstance& inst) {
  SparseLp lp;
  int online_rows = 0;
  for (const auto& batch : inst.stages) online_rows += static_cast<int>(batch.size());
  for (int i = 0; i < online_rows; ++i) lp.add_row(1.0);
  const int offline0 = online_rows;
  for (const auto& off : inst.offline) lp.add_row(off.B);

  int row = 0;
  for (const auto& batch : inst.stages) {
    for (const auto& online : batch) {
      for (const Edge& e : online.edges) {
        const OfflineVertex& off = inst.offline[e.j];
        double value = 0.0, usage = 1.0;
        switch (inst.variant) {
          case Variant::vwm:
            value = off.w;
            break;
          case Variant::bmatching:
            value = off.w;
            break;
          case Variant::adwords:
            value = e.b;
            usage = e.b;
            break;
        }
        int var = lp.add_col(value);
        lp.set(var, row, 1.0);
        lp.set(var, offline0 + e.j, usage);
      }
      ++row;
    }
  }
  LpSolution sol = solve_or_throw(lp, "offline allocation LP");
  return {sol.objective, std::move(sol.x), std::move(sol.duals)};
}

OfflineOptimum offline_mca(const McaInstance& inst) {
  const int J = inst.num_advertisers();
  SparseLp lp;
  for (int j = 0; j < J; ++j) lp.add_row(inst.advertisers[j].n);

  std::vector<int> user_row;
  for (const auto& batch : inst.stages) {
    for (std::size_t u = 0; u < batch.size(); ++u) user_row.push_back(lp.add_row(1.0));
  }

  // Allocation-share variables, then configuration variables, then the
  // coupling rows binding each share to its configuration.
  struct TripleCol {
    int var;
    int z_var;
    double xi;
  };
  std::vector<TripleCol> triples;
  int z_count = 0;
  for (const auto& batch : inst.stages) {
    for (const auto& u : batch) {
      for (const auto& cfg : u.configs) {
        for (const auto& alloc : cfg.alloc) {
          if (alloc.xi <= 0.0) continue;
          int var = lp.add_col(inst.price(alloc.tau));
          lp.set(var, alloc.j, 1.0);
          triples.push_back({var, z_count, alloc.xi});
        }
        ++z_count;
      }
    }
  }
  {
    int user = 0;
    for (const auto& batch : inst.stages) {
      for (const auto& u : batch) {
        for (std::size_t c = 0; c < u.configs.size(); ++c) {
          int var = lp.add_col(0.0);
          lp.set(var, user_row[user], 1.0);
        }
        ++user;
      }
    }
  }
  const int z_col0 = static_cast<int>(triples.size());
  for (const TripleCol& t : triples) {
    int row = lp.add_row(0.0);
    lp.set(t.var, row, 1.0);
    lp.set(z_col0 + t.z_var, row, -t.xi);
  }
  LpSolution sol = solve_or_throw(lp, "offline configuration LP");
  return {sol.objective, std::move(sol.x), std::move(sol.duals)};
}

// --- one-user greedy -------------------------------------------------------

PolicyResult greedy_matching(const MatchingInstance& inst) {
  std::vector<double> rem;
  rem.reserve(inst.offline.size());
  for (const auto& off : inst.offline) rem.push_back(off.B);

  PolicyResult out;
  out.policy = "online_greedy";
  for (const auto& batch : inst.stages) {
    double stage_value = 0.0;
    for (const auto& online : batch) {
      // Fractional knapsack over the vertex's unit of allocation: fill the
      // highest per-unit value edge first (ties to the lowest edge index).
      std::vector<int> order(online.edges.size());
      std::iota(order.begin(), order.end(), 0);
      auto density = [&](int e) {
        const Edge& edge = online.edges[e];
        const OfflineVertex& off = inst.offline[edge.j];
        switch (inst.variant) {
          case Variant::vwm:
          case Variant::bmatching:
            return off.w;
          case Variant::adwords:
            return edge.b;
        }
        return 0.0;
      };
      std::stable_sort(order.begin(), order.end(),
                       [&](int a, int b) { return density(a) > density(b); });
      double left = 1.0;
      for (int e : order) {
        if (left <= 1e-12) break;
        const Edge& edge = online.edges[e];
        double usage = inst.variant == Variant::adwords ? edge.b : 1.0;
        if (usage <= 0.0 || density(e) <= 0.0) continue;
        double take = std::min(left, rem[edge.j] / usage);
        if (take <= 0.0) continue;
        stage_value += density(e) * take;
        rem[edge.j] -= usage * take;
        left -= take;
      }
    }
    out.stage_values.push_back(stage_value);
    out.objective += stage_value;
  }
  return out;
}

PolicyResult greedy_mca(const McaInstance& inst) {
  const int J = inst.num_advertisers();
  const int T = inst.num_levels();
  std::vector<double> eta(static_cast<std::size_t>(J) * T, 0.0);

  // One user viewed as a complete single-stage instance: its marginal-value
  // LP over (shares, configurations, kept mass) is exactly that instance's
  // stage program with no hedging term.  Fractional mixes of configurations
  // are allowed; they can strictly beat every pure configuration.
  McaInstance slice;
  slice.K = 1;
  slice.advertisers = inst.advertisers;
  slice.prices = inst.prices;
  slice.stages.resize(1);

  PolicyResult out;
  out.policy = "online_greedy";
  for (const auto& batch : inst.stages) {
    double stage_value = 0.0;
    for (const auto& user : batch) {
      slice.stages[0] = {user};
      detail::McaStageProgram prog = detail::build_mca_stage(slice, 1, eta);
      detail::StageSolveResult r = detail::solve_stage(prog.objective, prog.polytope);
      std::vector<double> x = r.x;
      for (std::size_t v = 0; v < x.size(); ++v) {
        x[v] = std::clamp(x[v], 0.0, prog.polytope.upper[v]);
      }
      double marginal = prog.objective.constant;
      for (std::size_t v = 0; v < x.size(); ++v) marginal += prog.objective.linear[v] * x[v];
      eta = detail::mca_advance(slice, prog, x);
      stage_value += marginal;
    }
    out.stage_values.push_back(stage_value);
    out.objective += stage_value;
  }
  return out;
}

// --- one-batch greedy ------------------------------------------------------

PolicyResult batched_matching(const MatchingInstance& inst) {
  std::vector<double> y(inst.offline.size(), 0.0);
  PolicyResult out;
  out.policy = "batched_greedy";
  for (int k = 1; k <= inst.K; ++k) {
    detail::MatchingStageProgram prog = detail::build_matching_stage(inst, k, y);
    prog.objective.terms.clear();  // no hedging: plain stage LP
    detail::StageSolveResult r = detail::solve_stage(prog.objective, prog.polytope);
    double stage_value = 0.0;
    for (std::size_t v = 0; v < r.x.size(); ++v) {
      double xv = std::clamp(r.x[v], 0.0, 1.0);
      stage_value += prog.objective.linear[v] * xv;
      int j = prog.var_offline[v];
      y[j] = std::min(inst.offline[j].B, y[j] + prog.update_coef[v] * xv);
    }
    out.stage_values.push_back(stage_value);
    out.objective += stage_value;
  }
  return out;
}

PolicyResult batched_mca(const McaInstance& inst) {
  const int J = inst.num_advertisers();
  const int T = inst.num_levels();
  std::vector<double> eta(static_cast<std::size_t>(J) * T, 0.0);
  PolicyResult out;
  out.policy = "batched_greedy";
  for (int k = 1; k <= inst.K; ++k) {
    detail::McaStageProgram prog = detail::build_mca_stage(inst, k, eta);
    prog.objective.terms.clear();
    detail::StageSolveResult r = detail::solve_stage(prog.objective, prog.polytope);
    std::vector<double> x = r.x;
    for (std::size_t v = 0; v < x.size(); ++v) {
      x[v] = std::clamp(x[v], 0.0, prog.polytope.upper[v]);
    }
    double stage_value = prog.objective.constant;
    for (std::size_t v = 0; v < x.size(); ++v) stage_value += prog.objective.linear[v] * x[v];
    eta = detail::mca_advance(inst, prog, x);
    out.stage_values.push_back(stage_value);
    out.objective += stage_value;
  }
  return out;
}

double ratio_of(double objective, double opt) {
  return opt > 1e-12 ? objective / opt : 1.0;
}

}  // namespace

OfflineOptimum offline_opt(const Instance& instance) {
  require_valid(instance);
  if (const auto* m = std::get_if<MatchingInstance>(&instance)) return offline_matching(*m);
  return offline_mca(std::get<McaInstance>(instance));
}

PolicyResult online_greedy(const Instance& instance) {
  require_valid(instance);
  PolicyResult out;
  if (const auto* m = std::get_if<MatchingInstance>(&instance)) {
    out = greedy_matching(*m);
  } else {
    const auto& mca = std::get<McaInstance>(instance);
    out = greedy_mca(is_normalized(mca) ? mca : normalize_mca(mca));
  }
  out.ratio = ratio_of(out.objective, offline_opt(instance).value);
  return out;
}

PolicyResult batched_greedy(const Instance& instance) {
  require_valid(instance);
  PolicyResult out;
  if (const auto* m = std::get_if<MatchingInstance>(&instance)) {
    out = batched_matching(*m);
  } else {
    const auto& mca = std::get<McaInstance>(instance);
    out = batched_mca(is_normalized(mca) ? mca : normalize_mca(mca));
  }
  out.ratio = ratio_of(out.objective, offline_opt(instance).value);
  return out;
}

}  // namespace batchalloc
