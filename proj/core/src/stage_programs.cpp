#include "stage_programs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace batchalloc::detail {

MatchingStageProgram build_matching_stage(const MatchingInstance& instance, int k,
                                          const std::vector<double>& y) {
  if (k < 1 || k > instance.K) {
    throw std::invalid_argument("invalid-argument: stage index out of range");
  }
  const auto& batch = instance.stages[k - 1];
  MatchingStageProgram prog;
  prog.num_online = static_cast<int>(batch.size());
  prog.objective.schedule = RegularizerSchedule{instance.K};
  prog.objective.k = k;

  SparseLp& lp = prog.polytope;
  for (int i = 0; i < prog.num_online; ++i) lp.add_row(1.0);

  // One row and one regularizer term per offline vertex touched by the batch.
  std::vector<int> offline_row(instance.num_offline(), -1);
  std::vector<int> offline_term(instance.num_offline(), -1);
  for (int i = 0; i < prog.num_online; ++i) {
    for (const Edge& e : batch[i].edges) {
      const OfflineVertex& off = instance.offline[e.j];
      if (offline_row[e.j] < 0) {
        offline_row[e.j] = lp.add_row(std::max(0.0, off.B - y[e.j]));
        prog.row_offline.push_back(e.j);
        offline_term[e.j] = static_cast<int>(prog.objective.terms.size());
        SeparableTerm term;
        // Hedging weight per offline vertex: the regularizer argument is the
        // load fraction, so scaling by w*B (value per unit of capacity times
        // capacity) makes the marginal value of a unit w*(1 - f_k(load)).
        term.coef = instance.variant == Variant::adwords ? off.B : off.w * off.B;
        term.base = std::clamp(y[e.j] / off.B, 0.0, 1.0);
        prog.objective.terms.push_back(term);
      }
      double value_coef, update;
      switch (instance.variant) {
        case Variant::vwm:
          value_coef = off.w;
          update = 1.0;
          break;
        case Variant::bmatching:
          value_coef = off.w;
          update = 1.0;
          break;
        case Variant::adwords:
          value_coef = e.b;
          update = e.b;
          break;
      }
      int var = lp.add_col(value_coef);
      lp.set(var, i, 1.0);
      lp.set(var, offline_row[e.j], update);
      prog.objective.terms[offline_term[e.j]].weights.push_back({var, update / off.B});
      prog.update_coef.push_back(update);
      prog.var_offline.push_back(e.j);
      prog.var_online.push_back(i);
    }
  }
  prog.objective.linear = lp.c;
  return prog;
}

StageDecomposition decompose_matching_stage(const MatchingInstance& instance, int k,
                                            const std::vector<double>& y,
                                            const std::vector<double>& x) {
  const auto& batch = instance.stages[k - 1];
  const int n_online = static_cast<int>(batch.size());
  const int n_offline = instance.num_offline();

  StageDecomposition dec;
  dec.inflow.assign(n_offline, 0.0);
  std::vector<std::vector<int>> support_of_online(n_online);   // offline lists
  std::vector<std::vector<int>> support_of_offline(n_offline); // online lists
  std::vector<char> touched(n_offline, 0);
  {
    std::size_t var = 0;
    for (int i = 0; i < n_online; ++i) {
      for (const Edge& e : batch[i].edges) {
        if (var >= x.size()) {
          throw std::invalid_argument("invalid-argument: stage solution size mismatch");
        }
        touched[e.j] = 1;
        double units = (instance.variant == Variant::adwords ? e.b : 1.0) * x[var];
        dec.inflow[e.j] += std::max(0.0, units);
        if (x[var] > kSupportEps) {
          support_of_online[i].push_back(e.j);
          support_of_offline[e.j].push_back(i);
        }
        ++var;
      }
    }
    if (var != x.size()) {
      throw std::invalid_argument("invalid-argument: stage solution size mismatch");
    }
  }

  // Exhausted offline vertices and every online supporting one of them.
  std::vector<char> offline_exhausted(n_offline, 0);
  std::vector<char> online_exhausted(n_online, 0);
  for (int j = 0; j < n_offline; ++j) {
    if (!touched[j]) continue;
    double cap = instance.offline[j].B;
    if (y[j] + dec.inflow[j] >= cap - 1e-6 * std::max(1.0, cap)) {
      offline_exhausted[j] = 1;
      dec.exhausted.offlines.push_back(j);
    }
  }
  for (int i = 0; i < n_online; ++i) {
    for (int j : support_of_online[i]) {
      if (offline_exhausted[j]) {
        online_exhausted[i] = 1;
        dec.exhausted.onlines.push_back(i);
        break;
      }
    }
  }

  // Connected components of the support graph away from the exhausted group.
  std::vector<int> comp_online(n_online, -1), comp_offline(n_offline, -1);
  int n_components = 0;
  for (int start = 0; start < n_online; ++start) {
    if (online_exhausted[start] || comp_online[start] >= 0 ||
        support_of_online[start].empty()) {
      continue;
    }
    StageGroup group;
    std::vector<int> queue = {start};
    comp_online[start] = n_components;
    while (!queue.empty()) {
      int i = queue.back();
      queue.pop_back();
      group.onlines.push_back(i);
      for (int j : support_of_online[i]) {
        if (offline_exhausted[j] || comp_offline[j] >= 0) continue;
        comp_offline[j] = n_components;
        group.offlines.push_back(j);
        for (int i2 : support_of_offline[j]) {
          if (online_exhausted[i2] || comp_online[i2] >= 0) continue;
          comp_online[i2] = n_components;
          queue.push_back(i2);
        }
      }
    }
    std::sort(group.onlines.begin(), group.onlines.end());
    std::sort(group.offlines.begin(), group.offlines.end());
    dec.groups.push_back(std::move(group));
    ++n_components;
  }
  return dec;
}

}  // namespace batchalloc::detail
