#include "mca_program.hpp"

#include <stdexcept>

namespace batchalloc::detail {

namespace {
// Held mass below this is force-disposed rather than given a kept-mass
// variable; the objective constant still charges for it, so the stage value
// only ever under-counts by the dust itself.
constexpr double kEtaDust = 1e-15;
}  // namespace

McaStageProgram build_mca_stage(const McaInstance& instance, int k,
                                const std::vector<double>& eta) {
  const int J = instance.num_advertisers();
  const int T = instance.num_levels();
  if (k < 1 || k > instance.K) {
    throw std::invalid_argument("invalid-argument: stage index out of range");
  }
  if (static_cast<int>(eta.size()) != J * T) {
    throw std::invalid_argument("invalid-argument: held distribution has wrong shape");
  }

  McaStageProgram prog;
  prog.objective.schedule = RegularizerSchedule{instance.K};
  prog.objective.k = k;
  prog.adv_row.assign(J, -1);

  const auto& batch = instance.stages[k - 1];

  // x block.
  for (int u = 0; u < static_cast<int>(batch.size()); ++u) {
    const auto& user = batch[u];
    for (int c = 0; c < static_cast<int>(user.configs.size()); ++c) {
      const auto& config = user.configs[c];
      for (int a = 0; a < static_cast<int>(config.alloc.size()); ++a) {
        const auto& alloc = config.alloc[a];
        if (alloc.xi <= 0.0) continue;
        McaTripleRef ref;
        ref.user = u;
        ref.config = c;
        ref.alloc = a;
        ref.j = alloc.j;
        ref.tau = alloc.tau;
        ref.xi = alloc.xi;
        ref.price = instance.price(alloc.tau);
        prog.triples.push_back(ref);
      }
    }
  }
  prog.z_col0 = static_cast<int>(prog.triples.size());

  // z block.
  for (int u = 0; u < static_cast<int>(batch.size()); ++u) {
    const int configs = static_cast<int>(batch[u].configs.size());
    for (int c = 0; c < configs; ++c) prog.z_of.emplace_back(u, c);
  }
  prog.y_col0 = prog.z_col0 + static_cast<int>(prog.z_of.size());

  // y block.
  for (int j = 0; j < J; ++j) {
    for (int tau = 1; tau <= T; ++tau) {
      if (eta[j * T + (tau - 1)] > kEtaDust) prog.y_of.emplace_back(j, tau);
    }
  }

  SparseLp& lp = prog.polytope;
  for (const auto& ref : prog.triples) {
    lp.add_col(ref.price);
    if (prog.adv_row[ref.j] < 0) prog.adv_row[ref.j] = -2;  // mark touched
  }
  for (std::size_t i = 0; i < prog.z_of.size(); ++i) lp.add_col(0.0);
  for (const auto& [j, tau] : prog.y_of) {
    lp.add_col(instance.price(tau), eta[j * T + (tau - 1)]);
    if (prog.adv_row[j] < 0) prog.adv_row[j] = -2;
  }

  // Advertiser rows: total held mass (new plus kept) at most the unit demand.
  for (int j = 0; j < J; ++j) {
    if (prog.adv_row[j] == -2) prog.adv_row[j] = lp.add_row(1.0);
  }
  for (int t = 0; t < prog.z_col0; ++t) {
    lp.set(t, prog.adv_row[prog.triples[t].j], 1.0);
  }
  for (std::size_t i = 0; i < prog.y_of.size(); ++i) {
    lp.set(prog.y_col0 + static_cast<int>(i), prog.adv_row[prog.y_of[i].first], 1.0);
  }

  // User rows: at most one configuration per user in expectation.
  prog.user_row.resize(batch.size());
  for (int u = 0; u < static_cast<int>(batch.size()); ++u) {
    prog.user_row[u] = lp.add_row(1.0);
  }
  for (std::size_t i = 0; i < prog.z_of.size(); ++i) {
    lp.set(prog.z_col0 + static_cast<int>(i), prog.user_row[prog.z_of[i].first], 1.0);
  }

  // Coupling rows: each allocation runs at most its share of its config.
  // Locate the z column of each triple's (user, config).
  std::vector<int> z_base(batch.size() + 1, 0);
  for (int u = 0; u < static_cast<int>(batch.size()); ++u) {
    z_base[u + 1] = z_base[u] + static_cast<int>(batch[u].configs.size());
  }
  prog.triple_row.resize(prog.triples.size());
  for (int t = 0; t < static_cast<int>(prog.triples.size()); ++t) {
    const auto& ref = prog.triples[t];
    const int row = lp.add_row(0.0);
    prog.triple_row[t] = row;
    lp.set(t, row, 1.0);
    lp.set(prog.z_col0 + z_base[ref.user] + ref.config, row, -ref.xi);
  }

  // Objective: collected value of the final held distribution, minus the
  // value already held coming in, minus the convex stage penalty on each
  // cumulative mass.
  prog.objective.linear = lp.c;
  double held_value = 0.0;
  for (int j = 0; j < J; ++j) {
    for (int tau = 1; tau <= T; ++tau) {
      held_value += instance.price(tau) * eta[j * T + (tau - 1)];
    }
  }
  prog.objective.constant = -held_value;

  for (int j = 0; j < J; ++j) {
    if (prog.adv_row[j] < 0) continue;
    for (int tau = 1; tau <= T; ++tau) {
      SeparableTerm term;
      term.coef = instance.price(tau) - instance.price(tau - 1);
      term.base = 0.0;
      for (int t = 0; t < prog.z_col0; ++t) {
        if (prog.triples[t].j == j && prog.triples[t].tau >= tau) {
          term.weights.emplace_back(t, 1.0);
        }
      }
      for (std::size_t i = 0; i < prog.y_of.size(); ++i) {
        if (prog.y_of[i].first == j && prog.y_of[i].second >= tau) {
          term.weights.emplace_back(prog.y_col0 + static_cast<int>(i), 1.0);
        }
      }
      if (!term.weights.empty()) prog.objective.terms.push_back(std::move(term));
    }
  }
  return prog;
}

std::vector<double> mca_cumulative(const McaInstance& instance, const McaStageProgram& prog,
                                   const std::vector<double>& x) {
  const int J = instance.num_advertisers();
  const int T = instance.num_levels();
  std::vector<double> after = mca_advance(instance, prog, x);
  std::vector<double> H(J * T, 0.0);
  for (int j = 0; j < J; ++j) {
    double running = 0.0;
    for (int tau = T; tau >= 1; --tau) {
      running += after[j * T + (tau - 1)];
      H[j * T + (tau - 1)] = running;
    }
  }
  return H;
}

std::vector<double> mca_advance(const McaInstance& instance, const McaStageProgram& prog,
                                const std::vector<double>& x) {
  const int J = instance.num_advertisers();
  const int T = instance.num_levels();
  if (static_cast<int>(x.size()) < prog.y_col0 + static_cast<int>(prog.y_of.size())) {
    throw std::invalid_argument("invalid-argument: stage solution has wrong shape");
  }
  std::vector<double> after(J * T, 0.0);
  for (int t = 0; t < static_cast<int>(prog.triples.size()); ++t) {
    const auto& ref = prog.triples[t];
    after[ref.j * T + (ref.tau - 1)] += x[t];
  }
  for (std::size_t i = 0; i < prog.y_of.size(); ++i) {
    const auto& [j, tau] = prog.y_of[i];
    after[j * T + (tau - 1)] += x[prog.y_col0 + static_cast<int>(i)];
  }
  return after;
}

}  // namespace batchalloc::detail
