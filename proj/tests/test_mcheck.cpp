#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ott/dcflow.hpp"
#include "ott/error.hpp"
#include "ott/mcheck.hpp"
#include "support/cases.hpp"
#include "support/oracles.hpp"

using namespace ott;
using namespace ott::mcheck;

namespace {

// Path 1-2-3-4 with 2-3 switched on and 1-3 off; the batch swaps them.
RhoScenario swap_batch(const GridCase& g) {
  RhoScenario s;
  s.id = "swap";
  s.grid = &g;
  const Topology z0 = g.initial_topology();
  Topology z1 = z0;
  z1.set(1, false);
  z1.set(3, true);
  s.trajectory.topologies = {z0, z1};
  s.pg = dispatch_at(g, z0);
  return s;
}

}  // namespace

TEST_CASE("hand-built four-bus batch has exactly one bad variant in three") {
  const GridCase g = ott::testing::four_bus_rho();
  const RhoScenario s = swap_batch(g);
  const RhoResult r = rho_probability({s});
  REQUIRE(r.batches.size() == 1);
  CHECK(r.batches[0].variants == 3);
  CHECK(r.batches[0].violations == 1.0);
  CHECK(r.rho == 1.0 / 3.0);
  CHECK(r.standard_error == 0.0);
  CHECK_FALSE(r.no_intermediates);
  const RhoResult serial = rho_probability_serial({s});
  CHECK(serial.rho == r.rho);
}

TEST_CASE("sampled rho is within three standard errors and reproducible") {
  const GridCase g = ott::testing::four_bus_rho();
  const RhoScenario s = swap_batch(g);
  RhoOptions o;
  o.mode = RhoMode::sample;
  o.samples = 10000;
  o.seed = 17;
  const RhoResult a = rho_probability({s}, o);
  CHECK(a.standard_error > 0.0);
  CHECK(std::abs(a.rho - 1.0 / 3.0) <= 3.0 * a.standard_error);
  CHECK(a.batches[0].draws == 10000);
  const RhoResult b = rho_probability_serial({s}, o);
  CHECK(b.rho == a.rho);
  CHECK(b.standard_error == a.standard_error);
  o.seed = 18;
  CHECK(rho_probability({s}, o).rho != a.rho);
}

TEST_CASE("single-switch batches only revisit the previous topology") {
  const Scenario sc = ott::testing::five_bus_scenario();
  RhoScenario s;
  s.id = "one";
  s.grid = &sc.grid;
  s.trajectory = adhoc_one(sc.z0, *sc.zT);
  s.pg = dispatch_at(sc.grid, *sc.zT);
  const RhoResult r = rho_probability({s});
  CHECK_FALSE(r.no_intermediates);
  CHECK(r.rho == 0.0);
  for (const RhoBatch& b : r.batches) CHECK(b.variants == 1);

  RhoScenario still = s;
  still.trajectory.topologies = {sc.z0};
  const RhoResult e = rho_probability({still});
  CHECK(e.no_intermediates);
  CHECK(e.rho == 0.0);
  CHECK(e.batches.empty());
}

TEST_CASE("variant check agrees with an independent connectivity test") {
  const Scenario sc = ott::testing::five_bus_tight_scenario(0.8);
  const std::vector<double> pg = dispatch_at(sc.grid, *sc.zT);
  const VariantSpace space(sc.z0, *sc.zT);
  for (std::uint64_t i = 0; i < space.count(); ++i) {
    const Topology z = space.topology(i);
    bool want = !ott::testing::spans_all_buses(sc.grid, z);
    if (!want) {
      const auto f = dcflow::solve_dc_flow(sc.grid, z, pg);
      want = dcflow::check_limits(sc.grid, z, f, dcflow::LimitSet::relaxed).total > dcflow::kLimitTolerance;
    }
    CHECK(variant_violates(sc.grid, z, pg) == want);
  }
}

TEST_CASE("rho vanishes when every batch passes the exhaustive intermediate check") {
  const Scenario sc = ott::testing::five_bus_tight_scenario(0.8);
  const std::vector<double> pg = dispatch_at(sc.grid, *sc.zT);
  std::size_t clean = 0;
  std::vector<RhoScenario> all;
  for (const auto& blocks : ott::testing::ordered_set_partitions(changed_branches(sc.z0, *sc.zT), 3)) {
    RhoScenario s;
    s.id = "p" + std::to_string(all.size());
    s.grid = &sc.grid;
    s.trajectory = ott::testing::trajectory_from_blocks(sc.z0, blocks);
    s.pg = pg;
    const MetricReport m =
        validate_trajectory(sc.grid, s.trajectory, pg, SwitchMode::ss, dcflow::Condition4Mode::exhaustive);
    const RhoResult r = rho_probability({s});
    CHECK(r.rho >= 0.0);
    CHECK(r.rho <= 1.0);
    if (m.condition4) {
      ++clean;
      CHECK(r.rho == 0.0);
    }
    all.push_back(std::move(s));
  }
  CHECK(clean > 0);
  // Parallel and serial agree on the pooled set, batch by batch.
  const RhoResult p = rho_probability(all), q = rho_probability_serial(all);
  CHECK(p.rho == q.rho);
  REQUIRE(p.batches.size() == q.batches.size());
  for (std::size_t b = 0; b < p.batches.size(); ++b) CHECK(p.batches[b].violations == q.batches[b].violations);
}

TEST_CASE("pooled rho weights batches by variant count") {
  const GridCase g = ott::testing::four_bus_rho();
  const RhoScenario a = swap_batch(g);
  RhoScenario b = a;
  b.id = "reverse";
  std::swap(b.trajectory.topologies[0], b.trajectory.topologies[1]);
  const RhoResult r = rho_probability({a, b});
  double num = 0.0, den = 0.0;
  for (const RhoBatch& x : r.batches) {
    num += x.violations;
    den += static_cast<double>(x.variants);
  }
  CHECK(r.rho == doctest::Approx(num / den));
}

TEST_CASE("csv output") {
  const GridCase g = ott::testing::four_bus_rho();
  std::ostringstream os;
  write_rho_csv(os, rho_probability({swap_batch(g)}));
  CHECK(os.str() == "scenario,t,variants,violations,rho\nswap,1,3,1,0.333333333\ntotal,,3,1,0.333333333\n");
}

TEST_CASE("malformed input and enumeration cap") {
  const GridCase g = ott::testing::four_bus_rho();
  RhoScenario s = swap_batch(g);
  RhoScenario no_grid = s;
  no_grid.grid = nullptr;
  CHECK_THROWS_AS(rho_probability({no_grid}), InvalidInput);
  RhoScenario bad_pg = s;
  bad_pg.pg = {1.0};
  CHECK_THROWS_AS(rho_probability({bad_pg}), InvalidInput);
  RhoOptions zero;
  zero.mode = RhoMode::sample;
  zero.samples = 0;
  CHECK_THROWS_AS(rho_probability({s}, zero), InvalidInput);

  const Scenario sc = ott::testing::five_bus_scenario();
  RhoScenario big;
  big.id = "big";
  big.grid = &sc.grid;
  big.trajectory.topologies = {sc.z0, *sc.zT};
  big.pg = dispatch_at(sc.grid, sc.z0);
  RhoOptions capped;
  capped.cap = 3;
  CHECK_THROWS_AS(rho_probability({big}, capped), EnumerationTooLarge);
  capped.mode = RhoMode::sample;
  capped.samples = 50;
  CHECK_NOTHROW(rho_probability({big}, capped));
}
