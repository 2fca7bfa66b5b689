#include "batchalloc/mca.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "batchalloc/instances.hpp"
#include "batchalloc/regularizers.hpp"
#include "batchalloc/rng.hpp"
#include "doctest.h"
#include "mca_program.hpp"

using namespace batchalloc;

namespace {

McaInstance single_offer(double price) {
  McaInstance inst;
  inst.K = 1;
  inst.advertisers = {McaAdvertiser{1.0}};
  inst.prices = {price};
  McaConfig cfg;
  cfg.alloc.push_back({0, 1.0, 1});
  inst.stages = {{McaUser{{cfg}}}};
  return inst;
}

// One advertiser, two stages: a half-price offer arrives first, the full
// price offer second.  The optimal play takes the cheap offer, then displaces
// it entirely.
McaInstance displacement_micro() {
  McaInstance inst;
  inst.K = 2;
  inst.advertisers = {McaAdvertiser{1.0}};
  inst.prices = {0.5, 1.0};
  McaConfig low;
  low.alloc.push_back({0, 1.0, 1});
  McaConfig high;
  high.alloc.push_back({0, 1.0, 2});
  inst.stages = {{McaUser{{low}}}, {McaUser{{high}}}};
  return inst;
}

double sum_tail(const McaInstance& inst, const std::vector<double>& eta, int j, int tau) {
  double s = 0.0;
  for (int t = tau; t <= inst.num_levels(); ++t) s += eta[j * inst.num_levels() + (t - 1)];
  return s;
}

void check_stage_feasible(const McaInstance& inst, int k, const std::vector<double>& eta_before,
                          const StageTrace& st) {
  detail::McaStageProgram prog = detail::build_mca_stage(inst, k, eta_before);
  const SparseLp& lp = prog.polytope;
  REQUIRE(st.x.size() == static_cast<std::size_t>(lp.cols()));

  for (int v = 0; v < lp.cols(); ++v) {
    CHECK(st.x[v] >= -1e-9);
    CHECK(st.x[v] <= lp.upper[v] + 1e-9);
  }
  std::vector<double> row(lp.rows(), 0.0);
  for (int v = 0; v < lp.cols(); ++v) {
    for (const auto& [r, coeff] : lp.columns[v]) row[r] += coeff * st.x[v];
  }
  for (int r = 0; r < lp.rows(); ++r) CHECK(row[r] <= lp.b[r] + 1e-7);

  // Recorded stage value matches the program's payment line.
  double value = prog.objective.constant;
  for (int v = 0; v < lp.cols(); ++v) value += prog.objective.linear[v] * st.x[v];
  CHECK(st.value == doctest::Approx(value).epsilon(1e-9));

  // Held distribution advances exactly as the solution dictates.
  std::vector<double> after = detail::mca_advance(inst, prog, st.x);
  REQUIRE(st.eta_after.size() == after.size());
  for (std::size_t i = 0; i < after.size(); ++i) {
    CHECK(st.eta_after[i] == doctest::Approx(after[i]).epsilon(1e-12));
    CHECK(st.eta_after[i] >= -1e-9);
  }

  // The cumulative held distribution never shrinks at any price level: new
  // mass only displaces mass priced strictly below it.
  for (int j = 0; j < inst.num_advertisers(); ++j) {
    double mass = sum_tail(inst, st.eta_after, j, 1);
    CHECK(mass <= 1.0 + 1e-7);
    for (int tau = 1; tau <= inst.num_levels(); ++tau) {
      CHECK(sum_tail(inst, st.eta_after, j, tau) >=
            sum_tail(inst, eta_before, j, tau) - 1e-5);
    }
  }
}

}  // namespace

TEST_CASE("a single offer at one price level is taken in full") {
  McaInstance inst = single_offer(1.0);
  RunTrace trace = pr_mca(inst, RegularizerSchedule{1});
  CHECK(trace.algo == "pr_mca");
  REQUIRE(trace.stages.size() == 1);
  CHECK(trace.stages[0].lp_exact);
  CHECK(trace.objective == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(revenue(trace) == doctest::Approx(1.0).epsilon(1e-9));
  REQUIRE(trace.stages[0].eta_after.size() == 1);
  CHECK(trace.stages[0].eta_after[0] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("a better offer displaces held cheaper mass") {
  McaInstance inst = displacement_micro();
  RunTrace trace = pr_mca(inst, RegularizerSchedule{2});
  REQUIRE(trace.stages.size() == 2);

  // Stage 1 takes the half-price offer fully: the payoff 0.5 x - 0.5 F_1(x)
  // is increasing on [0, 1].
  const StageTrace& s1 = trace.stages[0];
  REQUIRE(s1.x.size() == 2);  // one allocation, one configuration
  CHECK(s1.x[0] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(s1.value == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(s1.eta_after[0] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(s1.eta_after[1] == doctest::Approx(0.0).epsilon(1e-7));

  // Stage 2 displaces it with the full-price offer: net payment is another
  // 0.5 and the final distribution sits entirely at the top price.
  const StageTrace& s2 = trace.stages[1];
  CHECK(s2.lp_exact);
  CHECK(s2.value == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(s2.eta_after[0] == doctest::Approx(0.0).epsilon(1e-7));
  CHECK(s2.eta_after[1] == doctest::Approx(1.0).epsilon(1e-7));

  CHECK(trace.objective == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(revenue(trace) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("held mass is kept when nothing displaces it") {
  McaInstance inst;
  inst.K = 2;
  inst.advertisers = {McaAdvertiser{1.0}, McaAdvertiser{1.0}};
  inst.prices = {1.0};
  McaConfig first;
  first.alloc.push_back({0, 1.0, 1});
  McaConfig second;
  second.alloc.push_back({1, 1.0, 1});
  inst.stages = {{McaUser{{first}}}, {McaUser{{second}}}};

  RunTrace trace = pr_mca(inst, RegularizerSchedule{2});
  CHECK(revenue(trace) == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(trace.objective == doctest::Approx(2.0).epsilon(1e-7));
  // Advertiser 0's unit survives stage 2 untouched.
  CHECK(trace.stages[1].eta_after[0] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(trace.stages[1].eta_after[1] == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("embedding a unit-capacity matching instance preserves the objective") {
  Rng rng(0xD15C0u);
  for (int trial = 0; trial < 6; ++trial) {
    RandomShape shape;
    shape.kind = "vwm";
    shape.K = 2 + trial % 2;
    shape.online_per_stage = 3;
    shape.offline = 4;
    MatchingInstance inst = std::get<MatchingInstance>(gen_random(shape, rng.next_u64()));

    RunTrace direct = pr_mwm(inst, RegularizerSchedule{inst.K});
    RunTrace embedded = pr_mca(to_mca(inst), RegularizerSchedule{inst.K});
    CAPTURE(trial);
    CHECK(revenue(embedded) == doctest::Approx(direct.objective).epsilon(1e-6));
    CHECK(embedded.objective == doctest::Approx(direct.objective).epsilon(1e-6));
  }
}

TEST_CASE("random menus satisfy the stage invariants") {
  Rng rng(0xCAFEu);
  for (int trial = 0; trial < 8; ++trial) {
    RandomShape shape;
    shape.kind = "mca";
    shape.K = 2 + trial % 2;
    shape.online_per_stage = 3;
    shape.offline = 3;
    shape.levels = 4;
    shape.configs_per_user = 3;
    shape.allocs_per_config = 2;
    shape.max_demand = (trial % 3 == 0) ? 3 : 1;  // exercise the normalizer
    McaInstance inst = std::get<McaInstance>(gen_random(shape, rng.next_u64()));
    if (shape.max_demand > 1) inst = normalize_mca(inst);

    RunTrace trace = pr_mca(inst, RegularizerSchedule{inst.K});
    CAPTURE(trial);
    REQUIRE(trace.stages.size() == static_cast<std::size_t>(inst.K));

    std::vector<double> eta(inst.num_advertisers() * inst.num_levels(), 0.0);
    double telescoped = 0.0;
    for (int k = 1; k <= inst.K; ++k) {
      const StageTrace& st = trace.stages[k - 1];
      CHECK(st.fw_gap <= 1e-8);
      for (std::size_t i = 0; i < eta.size(); ++i) {
        CHECK(st.eta_before[i] == doctest::Approx(eta[i]).epsilon(1e-12));
      }
      check_stage_feasible(inst, k, eta, st);
      telescoped += st.value;
      eta = st.eta_after;
    }
    CHECK(trace.stages.back().lp_exact);
    CHECK(!trace.stages.back().last_lp.duals.empty());
    CHECK(trace.objective == doctest::Approx(telescoped).epsilon(1e-12));
    CHECK(revenue(trace) == doctest::Approx(trace.objective).epsilon(1e-9));
  }
}

TEST_CASE("configuration-allocation preconditions are enforced") {
  McaInstance inst = single_offer(1.0);

  SUBCASE("schedule horizon must match") {
    CHECK_THROWS_AS(pr_mca(inst, RegularizerSchedule{3}), std::invalid_argument);
  }
  SUBCASE("demands must be normalized") {
    McaInstance wide = inst;
    wide.advertisers[0].n = 2.0;
    CHECK_THROWS_AS(pr_mca(wide, RegularizerSchedule{1}), std::invalid_argument);
    McaInstance fixed = normalize_mca(wide);
    CHECK_NOTHROW(pr_mca(fixed, RegularizerSchedule{1}));
  }
  SUBCASE("revenue rejects non-auction traces") {
    MatchingInstance vwm;
    vwm.variant = Variant::vwm;
    vwm.K = 1;
    vwm.offline = {{1.0, 1.0}};
    vwm.stages = {{OnlineVertex{{Edge{0}}}}};
    RunTrace trace = pr_mwm(vwm, RegularizerSchedule{1});
    CHECK_THROWS_AS(revenue(trace), std::invalid_argument);
  }
}

TEST_CASE("a user with an empty menu contributes nothing") {
  McaInstance inst = single_offer(1.0);
  inst.stages[0].push_back(McaUser{});  // no configurations
  RunTrace trace = pr_mca(inst, RegularizerSchedule{1});
  CHECK(revenue(trace) == doctest::Approx(1.0).epsilon(1e-9));
}
