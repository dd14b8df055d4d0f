#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ott/error.hpp"
#include "ott/solver_driver.hpp"
#include "support/cases.hpp"
#include "support/oracles.hpp"

using namespace ott;
using milp::SolveStatus;

namespace {

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

void check_balanced(const GridCase& g, const Trajectory& t, const std::vector<double>& pg) {
  for (const Topology& z : t.topologies) {
    const dcflow::FlowState s = dcflow::solve_dc_flow(g, z, pg);
    CHECK(dcflow::balance_residual(g, s) <= 1e-8);
  }
}

}  // namespace

TEST_CASE("horizon lower bound") {
  const Scenario s = ott::testing::five_bus_scenario();
  // z0 o zT leaves two branches on five buses, so one batch cannot work.
  CHECK(compute_T_lower(s.grid, s.z0, *s.zT, SwitchMode::ss) == 2);
  CHECK(compute_T_lower(s.grid, s.z0, *s.zT, SwitchMode::as) == 2);
  CHECK(compute_T_lower(s.grid, s.z0, s.z0, SwitchMode::as) == 0);
  Topology one = s.z0;
  one.set(4, true);
  CHECK(compute_T_lower(s.grid, s.z0, one, SwitchMode::ss) == 1);
  CHECK(compute_T_lower(s.grid, s.z0, one, SwitchMode::as) == 1);
}

TEST_CASE("direct OTT matches exhaustive trajectory search on the small corpus") {
  for (const auto& in : ott::testing::small_corpus()) {
    for (SwitchMode mode : {SwitchMode::ss, SwitchMode::as}) {
      OttConfig cfg;
      cfg.mode = mode;
      cfg.necessary_only = true;
      cfg.T_u = std::max<std::size_t>(1, hamming_distance(in.z0, in.zT));
      const auto want = ott::testing::search_trajectories(in.grid, in.z0, in.zT, in.pg, cfg);
      const OttResult got = solve_ott_direct(in.grid, in.z0, in.zT, in.pg, cfg);
      CAPTURE(in.id);
      REQUIRE(want.best.has_value());
      REQUIRE(got.status == SolveStatus::optimal);
      CHECK(rel_diff(got.objective, want.best_objective) <= 1e-6);
      CHECK(rel_diff(evaluate_objective(in.grid, got.decision.trajectory, in.pg, cfg), got.objective) <= 1e-6);
      check_balanced(in.grid, got.decision.trajectory, in.pg);
    }
  }
}

TEST_CASE("five-bus OTT at two batches is clean and no worse than the synchronous order") {
  const Scenario s = ott::testing::five_bus_scenario();
  const std::vector<double> pg = dispatch_at(s.grid, *s.zT);
  OttConfig cfg;
  cfg.T_u = 2;
  const OttResult r = solve_ott_direct(s.grid, s.z0, *s.zT, pg, cfg);
  REQUIRE(r.status == SolveStatus::optimal);
  CHECK(r.report.H_p <= 1e-9);
  CHECK(r.report.condition1);
  const double syn = evaluate_objective(s.grid, adhoc_syn(s.z0, *s.zT), pg, cfg);
  CHECK(r.objective <= syn * (1.0 + 1e-9));
  check_balanced(s.grid, r.decision.trajectory, pg);
}

TEST_CASE("necessary-only five-bus solve at four batches matches exhaustive search") {
  // This model once drove the dual simplex into a long non-degenerate cycle.
  const Scenario s = ott::testing::five_bus_scenario();
  const std::vector<double> pg = dispatch_at(s.grid, *s.zT);
  OttConfig cfg;
  cfg.T_u = 4;
  cfg.necessary_only = true;
  const OttResult r = solve_ott_direct(s.grid, s.z0, *s.zT, pg, cfg);
  REQUIRE(r.status == SolveStatus::optimal);
  const auto want = ott::testing::search_trajectories(s.grid, s.z0, *s.zT, pg, cfg);
  CHECK(rel_diff(r.objective, want.best_objective) <= 1e-6);
}

TEST_CASE("warm-start candidates do not change the optimum") {
  const Scenario s = ott::testing::five_bus_scenario();
  const std::vector<double> pg = dispatch_at(s.grid, *s.zT);
  OttConfig cfg;
  cfg.T_u = 3;
  const OttResult cold = solve_ott_direct(s.grid, s.z0, *s.zT, pg, cfg);
  const OttResult warm = solve_ott_direct(s.grid, s.z0, *s.zT, pg, cfg, {},
                                          {adhoc_syn(s.z0, *s.zT), adhoc_asy(s.grid, s.z0, *s.zT)});
  REQUIRE(cold.status == SolveStatus::optimal);
  REQUIRE(warm.status == SolveStatus::optimal);
  CHECK(rel_diff(warm.objective, cold.objective) <= 1e-9);
  CHECK(warm.runs.front().warm_started);
  // Too long for the horizon: encodes nowhere, so no warm start.
  const OttResult none = solve_ott_direct(s.grid, s.z0, *s.zT, pg, cfg, {}, {adhoc_one(s.z0, *s.zT)});
  CHECK_FALSE(none.runs.front().warm_started);
}

TEST_CASE("solves are deterministic") {
  const Scenario s = ott::testing::five_bus_tight_scenario(0.8);
  const std::vector<double> pg = dispatch_at(s.grid, *s.zT);
  OttConfig cfg;
  cfg.T_u = 3;
  const OttResult a = solve_ott_direct(s.grid, s.z0, *s.zT, pg, cfg);
  const OttResult b = solve_ott_direct(s.grid, s.z0, *s.zT, pg, cfg);
  CHECK(a.objective == b.objective);
  CHECK(a.nodes == b.nodes);
  CHECK(a.decision.trajectory.topologies == b.decision.trajectory.topologies);
}

TEST_CASE("algorithm 1 reaches the direct optimum on the small corpus") {
  for (const auto& in : ott::testing::small_corpus()) {
    for (SwitchMode mode : {SwitchMode::ss, SwitchMode::as}) {
      OttConfig cfg;
      cfg.mode = mode;
      cfg.T_u = std::max<std::size_t>(1, hamming_distance(in.z0, in.zT));
      const OttResult direct = solve_ott_direct(in.grid, in.z0, in.zT, in.pg, cfg);
      const OttResult alg = algorithm1(in.grid, in.z0, in.zT, in.pg, cfg);
      CAPTURE(in.id);
      REQUIRE(direct.status == SolveStatus::optimal);
      REQUIRE(alg.status == SolveStatus::optimal);
      CHECK(rel_diff(alg.objective, direct.objective) <= 1e-6);
      CHECK_FALSE(alg.runs.empty());
      CHECK(alg.runs.front().necessary_only);
    }
  }
}

TEST_CASE("OTS driver and dispatch helper") {
  const GridCase g = ott::testing::four_bus_critical();
  const OtsResult r = solve_ots(g, g.initial_topology(), g.num_branches(), 0);
  REQUIRE(r.has_solution());
  CHECK(r.solution.cost == doctest::Approx(2.3));
  const std::vector<double> pg = dispatch_at(g, g.initial_topology());
  CHECK(dcflow::dispatch_cost(g, pg) == doctest::Approx(2.35));
  CHECK_THROWS_AS(dispatch_at(g.with_load_scale(1.5), g.initial_topology()), InvalidInput);
}

TEST_CASE("TETOP on the critical four-bus case trades dispatch cost for a clean transition") {
  const Scenario s = ott::testing::four_bus_swap_scenario();
  TetopConfig tc;
  tc.ott.T_u = 2;
  const ModelComparison c = run_models_123(s.grid, s.z0, tc);
  REQUIRE(c.ots.has_solution());
  REQUIRE(c.model2.has_solution());
  CHECK(c.model1.second_pass);
  CHECK(c.model1.report.H_p > 1e-6);
  CHECK(c.model2.report.H_p <= 1e-9);
  CHECK(c.r_f2 > 0.0);
  CHECK(c.r_f2 == doctest::Approx((c.model2.dispatch_cost - c.ots.solution.cost) / c.ots.solution.cost));
  CHECK(c.r_f3 >= c.r_f2 - 1e-9);
  check_balanced(s.grid, c.model2.decision.trajectory, c.model2.decision.pg);
}

TEST_CASE("TETOP reaches the OTS optimum on non-critical scenarios") {
  std::vector<Scenario> scenarios;
  for (double f : {0.4, 0.55, 0.7, 0.85}) scenarios.push_back(ott::testing::four_bus_swap_scenario(f));
  for (double f : {0.6, 0.8}) scenarios.push_back(ott::testing::five_bus_scenario(f));
  std::size_t certified = 0;
  for (const Scenario& s : scenarios) {
    const OtsResult ots = solve_ots(s.grid, s.z0, s.grid.num_branches(), 0);
    REQUIRE(ots.has_solution());
    TetopConfig tc;
    tc.ott.T_u = 2;
    const bool noncritical = ott::testing::tetop_noncritical(s.grid, s.z0, ots.solution.z, ots.solution.pg, tc.ott);
    const TetopResult t = solve_tetop_direct(s.grid, s.z0, tc);
    REQUIRE(t.has_solution());
    // The shared dispatch must also serve z0, so the z0 optimum is a floor.
    const auto floor = ott::testing::opf_cost(s.grid, s.z0);
    REQUIRE(floor.has_value());
    CHECK(t.dispatch_cost >= *floor - 1e-9);
    CHECK(t.dispatch_cost >= ots.solution.cost * (1.0 - 1e-9));
    CHECK(t.report.H_p <= 1e-9);
    if (!noncritical) continue;
    ++certified;
    CHECK(rel_diff(t.dispatch_cost, ots.solution.cost) <= 1e-6);
  }
  CHECK(certified >= 1);
}

TEST_CASE("TETOP algorithm 1 matches the direct solve") {
  const Scenario s = ott::testing::four_bus_swap_scenario(0.85);
  TetopConfig tc;
  tc.ott.T_u = 2;
  const TetopResult direct = solve_tetop_direct(s.grid, s.z0, tc);
  const TetopResult alg = tetop_algorithm1(s.grid, s.z0, tc);
  REQUIRE(direct.has_solution());
  REQUIRE(alg.has_solution());
  CHECK(rel_diff(alg.objective, direct.objective) <= 1e-6);
  CHECK(alg.runs.front().T_u == 1);
}

TEST_CASE("relative cost change") {
  CHECK(relative_cost_change(2.0, 2.5) == doctest::Approx(0.25));
  CHECK(relative_cost_change(2.0, 2.0) == 0.0);
}
