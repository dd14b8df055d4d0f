#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "ott/dcflow.hpp"
#include "ott/error.hpp"
#include "support/cases.hpp"
#include "support/oracles.hpp"

using namespace ott;
using namespace ott::dcflow;

namespace {

// Dispatch that balances the load by drawing on the generators in order.
std::vector<double> greedy_dispatch(const GridCase& g, std::mt19937_64& rng) {
  double load = 0.0;
  for (const Bus& b : g.buses()) load += b.p_d;
  std::vector<double> pg(g.num_buses(), 0.0);
  std::uniform_real_distribution<double> share(0.0, 1.0);
  std::vector<std::size_t> gens;
  for (std::size_t i = 0; i < g.num_buses(); ++i)
    if (g.bus(i).p_g_max > 0.0) gens.push_back(i);
  double left = load;
  for (std::size_t k = 0; k < gens.size(); ++k) {
    const double cap = g.bus(gens[k]).p_g_max;
    const double take = k + 1 == gens.size() ? left : std::min(cap, left * share(rng));
    pg[gens[k]] = take;
    left -= take;
  }
  return pg;
}

// On a spanning tree the flows follow from nodal balance alone: each branch
// carries the net injection of the subtree hanging below it.
std::vector<double> tree_flows(const GridCase& g, const Topology& z, const std::vector<double>& pg) {
  const std::size_t n = g.num_buses();
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(n);
  for (std::size_t e = 0; e < g.num_branches(); ++e) {
    if (!z[e]) continue;
    adj[g.from_index(e)].push_back({g.to_index(e), e});
    adj[g.to_index(e)].push_back({g.from_index(e), e});
  }
  std::vector<double> flow(g.num_branches(), 0.0);
  std::function<double(std::size_t, std::size_t)> subtree = [&](std::size_t u, std::size_t via) {
    double s = pg[u] - g.bus(u).p_d;
    for (auto [v, e] : adj[u]) {
      if (e == via) continue;
      const double below = subtree(v, e);
      // Net injection below v leaves through e towards u.
      flow[e] = g.from_index(e) == v ? below : -below;
      s += below;
    }
    return s;
  };
  subtree(g.reference_index(), static_cast<std::size_t>(-1));
  return flow;
}

}  // namespace

TEST_CASE("two-bus flow equals the transfer and angles follow b") {
  const GridCase g = ott::testing::two_bus();
  const Topology z = g.initial_topology();
  double load = 0.0;
  for (const Bus& b : g.buses()) load += b.p_d;
  std::vector<double> pg(g.num_buses(), 0.0);
  pg[g.reference_index()] = load;
  const FlowState s = solve_dc_flow(g, z, pg);
  CHECK(s.theta[g.reference_index()] == 0.0);
  double total = 0.0;
  for (std::size_t e = 0; e < g.num_branches(); ++e) {
    if (!z[e]) continue;
    CHECK(s.p_l[e] == doctest::Approx(g.branch(e).b * s.angle_difference(g, e)));
    total += g.from_index(e) == g.reference_index() ? s.p_l[e] : -s.p_l[e];
  }
  CHECK(total == doctest::Approx(load - g.bus(g.reference_index()).p_d));
  CHECK(balance_residual(g, s) <= kBalanceTolerance);
}

TEST_CASE("random dispatches on every connected five-bus topology balance") {
  const GridCase g = ott::testing::all_switchable(ott::testing::five_bus());
  std::mt19937_64 rng(7);
  std::size_t solved = 0, trees = 0;
  for (std::uint64_t mask = 0; mask < (1u << g.num_branches()); ++mask) {
    Topology z(g.num_branches(), false);
    for (std::size_t e = 0; e < g.num_branches(); ++e) z.set(e, (mask >> e) & 1);
    const std::vector<double> pg = greedy_dispatch(g, rng);
    if (!ott::testing::spans_all_buses(g, z)) {
      CHECK_THROWS_AS(solve_dc_flow(g, z, pg), Disconnected);
      continue;
    }
    const FlowState s = solve_dc_flow(g, z, pg);
    ++solved;
    REQUIRE(balance_residual(g, s) <= kBalanceTolerance);
    for (std::size_t e = 0; e < g.num_branches(); ++e) {
      if (!z[e]) CHECK(s.p_l[e] == 0.0);
      else CHECK(s.p_l[e] == doctest::Approx(g.branch(e).b * s.angle_difference(g, e)).epsilon(1e-12));
    }
    if (z.count_on() == g.num_buses() - 1) {
      ++trees;
      const std::vector<double> f = tree_flows(g, z, pg);
      for (std::size_t e = 0; e < g.num_branches(); ++e) CHECK(s.p_l[e] == doctest::Approx(f[e]).epsilon(1e-10));
    }
  }
  CHECK(solved > 20);
  CHECK(trees > 5);
}

TEST_CASE("imbalance and bad sizes are rejected") {
  const GridCase g = ott::testing::five_bus();
  std::vector<double> pg(g.num_buses(), 0.0);
  CHECK_THROWS_AS(solve_dc_flow(g, g.initial_topology(), pg), PowerImbalance);
  CHECK_THROWS_AS(solve_dc_flow(g, g.initial_topology(), {1.0}), InvalidInput);
  CHECK_THROWS_AS(dispatch_cost(g, {1.0}), InvalidInput);
}

TEST_CASE("limit excess is measured against the chosen limit set") {
  const GridCase g = ott::testing::two_bus();
  const Topology z = g.initial_topology();
  FlowState s;
  s.theta.assign(g.num_buses(), 0.0);
  s.p_l.assign(g.num_branches(), 0.0);
  s.p_g.assign(g.num_buses(), 0.0);
  const Branch& br = g.branch(0);
  const double dtheta = br.theta_max_relaxed + 0.1;
  s.theta[g.from_index(0)] = dtheta;
  s.p_l[0] = br.p_max + 0.25;
  const ViolationReport normal = check_limits(g, z, s, LimitSet::normal);
  const ViolationReport relaxed = check_limits(g, z, s, LimitSet::relaxed);
  CHECK(normal.angle[0] == doctest::Approx(dtheta - br.theta_max));
  CHECK(normal.flow[0] == doctest::Approx(0.25));
  CHECK(relaxed.angle[0] == doctest::Approx(0.1));
  CHECK(relaxed.flow[0] == doctest::Approx(std::max(0.0, br.p_max + 0.25 - br.p_max_relaxed)));
  CHECK_FALSE(normal.clean());
}

TEST_CASE("the single-batch transition of the five-bus figure has a disconnected variant") {
  const Scenario s = ott::testing::five_bus_scenario();
  const std::vector<double> pg = dispatch_at(s.grid, *s.zT);
  CHECK_FALSE(condition4_feasible(s.grid, s.z0, *s.zT, pg, Condition4Mode::exhaustive));
  CHECK_FALSE(condition4_feasible(s.grid, s.z0, *s.zT, pg, Condition4Mode::assumption));
  const VariantSpace space(s.z0, *s.zT);
  std::size_t split = 0;
  for (std::uint64_t i = 0; i < space.count(); ++i) split += !is_connected(s.grid, space.topology(i));
  CHECK(split > 0);
  CHECK(condition4_feasible(s.grid, s.z0, s.z0, pg, Condition4Mode::assumption));
}

TEST_CASE("exhaustive intermediate feasibility implies the assumption check when the batch closes") {
  const GridCase g = ott::testing::all_switchable(ott::testing::five_bus());
  const Scenario s = ott::testing::five_bus_scenario();
  const std::vector<double> pg = dispatch_at(s.grid, s.z0);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> coin(0, 1);
  std::size_t checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    Topology a(g.num_branches(), false), b(g.num_branches(), false);
    for (std::size_t e = 0; e < g.num_branches(); ++e) {
      a.set(e, coin(rng));
      b.set(e, coin(rng));
    }
    bool closes = false;
    for (std::size_t e = 0; e < g.num_branches(); ++e) closes = closes || (!a[e] && b[e]);
    if (!closes || !is_connected(g, a) || !is_connected(g, b)) continue;
    ++checked;
    if (condition4_feasible(g, a, b, pg, Condition4Mode::exhaustive))
      CHECK(condition4_feasible(g, a, b, pg, Condition4Mode::assumption));
  }
  CHECK(checked > 10);
}

TEST_CASE("dispatch cost and rebalancing") {
  const GridCase g = ott::testing::five_bus();
  std::vector<double> pg(g.num_buses(), 0.0);
  double load = 0.0;
  for (const Bus& b : g.buses()) load += b.p_d;
  pg[0] = load + 3e-6;
  const std::vector<double> fixed = balance_dispatch(g, pg);
  double sum = 0.0;
  for (std::size_t i = 0; i < g.num_buses(); ++i) sum += fixed[i] - g.bus(i).p_d;
  CHECK(std::abs(sum) <= kBalanceTolerance);
  CHECK(fixed[0] == doctest::Approx(load).epsilon(1e-12));
  CHECK(dispatch_cost(g, fixed) == doctest::Approx(g.bus(0).cost_linear * fixed[0]));
  pg[0] = load + 1.0;
  CHECK_THROWS_AS(balance_dispatch(g, pg), PowerImbalance);
}
