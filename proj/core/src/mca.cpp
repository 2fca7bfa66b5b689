#include "batchalloc/mca.hpp"

#include <algorithm>
#include <stdexcept>

#include "mca_program.hpp"
#include "stage_refine.hpp"

namespace batchalloc {
namespace {

detail::StageSolveOptions map_options(const StageSolverConfig& cfg) {
  detail::StageSolveOptions opts;
  opts.use_fw = cfg.use_fw;
  opts.fw_config = cfg.fw;
  opts.target_gap = cfg.target_gap;
  opts.max_rounds = cfg.max_rounds;
  return opts;
}

}  // namespace

RunTrace pr_mca(const McaInstance& instance, const RegularizerSchedule& schedule,
                const StageSolverConfig& cfg) {
  ValidationReport report = validate(instance);
  if (!report.ok) throw std::invalid_argument("invalid-argument: " + report.error);
  for (const auto& adv : instance.advertisers) {
    if (adv.n != 1.0) {
      throw std::invalid_argument(
          "invalid-argument: pr_mca requires a normalized instance (unit demands); "
          "run normalize_mca first");
    }
  }
  if (schedule.K != instance.K) {
    throw std::invalid_argument("invalid-argument: schedule horizon does not match instance");
  }

  const int J = instance.num_advertisers();
  const int T = instance.num_levels();

  RunTrace trace;
  trace.algo = "pr_mca";
  trace.instance = instance;

  std::vector<double> eta(static_cast<std::size_t>(J) * T, 0.0);
  for (int k = 1; k <= instance.K; ++k) {
    detail::McaStageProgram prog = detail::build_mca_stage(instance, k, eta);
    detail::StageSolveResult result =
        detail::solve_stage(prog.objective, prog.polytope, map_options(cfg));

    std::vector<double> x = result.x;
    for (std::size_t v = 0; v < x.size(); ++v) {
      x[v] = std::clamp(x[v], 0.0, prog.polytope.upper[v]);
    }

    StageTrace st;
    st.eta_before = eta;
    st.x = x;
    st.fw_gap = result.gap;
    st.lp_exact = result.lp_was_exact;
    if (result.lp_was_exact) st.last_lp = result.last_lp;

    double value = prog.objective.constant;
    for (std::size_t v = 0; v < x.size(); ++v) value += prog.objective.linear[v] * x[v];
    st.value = value;

    eta = detail::mca_advance(instance, prog, x);
    st.eta_after = eta;

    trace.objective += st.value;
    trace.fw_gap_max = std::max(trace.fw_gap_max, st.fw_gap);
    trace.stages.push_back(std::move(st));
  }
  return trace;
}

double revenue(const RunTrace& trace) {
  const auto* instance = std::get_if<McaInstance>(&trace.instance);
  if (instance == nullptr || trace.stages.empty()) {
    throw std::invalid_argument(
        "invalid-argument: revenue needs a configuration-allocation trace");
  }
  const int T = instance->num_levels();
  const auto& eta = trace.stages.back().eta_after;
  if (static_cast<int>(eta.size()) != instance->num_advertisers() * T) {
    throw std::invalid_argument("invalid-argument: trace held distribution has wrong shape");
  }
  double total = 0.0;
  for (int j = 0; j < instance->num_advertisers(); ++j) {
    for (int tau = 1; tau <= T; ++tau) {
      total += instance->price(tau) * eta[j * T + (tau - 1)];
    }
  }
  return total;
}

}  // namespace batchalloc
