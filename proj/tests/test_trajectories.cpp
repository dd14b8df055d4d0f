#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "ott/error.hpp"
#include "ott/trajectories.hpp"
#include "support/cases.hpp"
#include "support/oracles.hpp"

using namespace ott;

namespace {

// Every changed branch flips exactly once and nothing else moves.
void check_necessary_only(const Trajectory& t, const Topology& z0, const Topology& zT) {
  REQUIRE(t.topologies.front() == z0);
  REQUIRE(t.topologies.back() == zT);
  std::vector<int> flips(z0.size(), 0);
  for (std::size_t s = 1; s < t.topologies.size(); ++s)
    for (std::size_t e : changed_branches(t.topologies[s - 1], t.topologies[s])) ++flips[e];
  for (std::size_t e = 0; e < z0.size(); ++e) CHECK(flips[e] == (z0[e] != zT[e] ? 1 : 0));
}

}  // namespace

TEST_CASE("synchronous ad-hoc order closes everything and then opens") {
  const Scenario s = ott::testing::five_bus_scenario();
  const Trajectory t = adhoc_syn(s.z0, *s.zT);
  REQUIRE(t.T() == 2);
  check_necessary_only(t, s.z0, *s.zT);
  for (std::size_t e = 0; e < s.z0.size(); ++e) CHECK(t.topologies[1][e] == (s.z0[e] || (*s.zT)[e]));

  Topology only_open = s.z0;
  only_open.set(1, false);
  CHECK(adhoc_syn(s.z0, only_open).T() == 1);
  CHECK(adhoc_syn(s.z0, s.z0).T() == 0);
}

TEST_CASE("asynchronous ad-hoc order keeps every batch inside one agent") {
  const Scenario s = ott::testing::five_bus_scenario();
  const Trajectory t = adhoc_asy(s.grid, s.z0, *s.zT);
  check_necessary_only(t, s.z0, *s.zT);
  CHECK(t.T() == 4);
  bool opened = false;
  for (std::size_t k = 1; k <= t.T(); ++k) {
    std::set<std::size_t> owners;
    bool closes = false, opens = false;
    for (std::size_t e : changed_branches(t.topologies[k - 1], t.topologies[k])) {
      owners.insert(s.grid.agent_of(e));
      (t.topologies[k][e] ? closes : opens) = true;
    }
    CHECK(owners.size() == 1);
    CHECK_FALSE((closes && opens));
    if (opens) opened = true;
    if (opened) CHECK_FALSE(closes);
  }
  CHECK_THROWS_AS(adhoc_asy(ott::testing::all_switchable(s.grid), s.z0, *s.zT), InvalidInput);
}

TEST_CASE("one-switch ad-hoc order") {
  const Scenario s = ott::testing::five_bus_scenario();
  const Trajectory t = adhoc_one(s.z0, *s.zT);
  check_necessary_only(t, s.z0, *s.zT);
  REQUIRE(t.T() == hamming_distance(s.z0, *s.zT));
  std::vector<std::size_t> order;
  for (std::size_t k = 1; k <= t.T(); ++k) {
    const auto c = changed_branches(t.topologies[k - 1], t.topologies[k]);
    REQUIRE(c.size() == 1);
    order.push_back(c[0]);
  }
  // Closings (branches 4, 5, 6) first, then openings (1, 2).
  CHECK(order == std::vector<std::size_t>{4, 5, 6, 1, 2});

  const std::vector<std::size_t> custom{2, 4, 1, 6, 5};
  const Trajectory u = adhoc_one(s.z0, *s.zT, custom);
  for (std::size_t k = 1; k <= u.T(); ++k)
    CHECK(changed_branches(u.topologies[k - 1], u.topologies[k]) == std::vector<std::size_t>{custom[k - 1]});
  CHECK_THROWS_AS(adhoc_one(s.z0, *s.zT, std::vector<std::size_t>{2, 4, 1}), InvalidInput);
  CHECK_THROWS_AS(adhoc_one(s.z0, *s.zT, std::vector<std::size_t>{2, 4, 1, 6, 3}), InvalidInput);
}

TEST_CASE("five-bus transition: the direct batch splits the network, ad-hoc orders do not") {
  const Scenario s = ott::testing::five_bus_scenario();
  const std::vector<double> pg = dispatch_at(s.grid, *s.zT);
  Trajectory direct;
  direct.topologies = {s.z0, *s.zT};
  const MetricReport d =
      validate_trajectory(s.grid, direct, pg, SwitchMode::ss, dcflow::Condition4Mode::exhaustive);
  CHECK_FALSE(d.condition1);
  CHECK_FALSE(d.condition4);
  CHECK(d.batches[0].disconnected_variants > 0);
  CHECK(std::isinf(model_objective(d, Weights{})));

  for (const Trajectory& t : {adhoc_syn(s.z0, *s.zT), adhoc_asy(s.grid, s.z0, *s.zT)}) {
    const MetricReport r = validate_trajectory(s.grid, t, pg, SwitchMode::ss, dcflow::Condition4Mode::assumption);
    CHECK(r.condition1);
    CHECK(std::isfinite(model_objective(r, Weights{})));
  }
  const MetricReport asy = validate_trajectory(s.grid, adhoc_asy(s.grid, s.z0, *s.zT), pg, SwitchMode::as,
                                               dcflow::Condition4Mode::assumption);
  CHECK(asy.condition5);
  const MetricReport syn =
      validate_trajectory(s.grid, adhoc_syn(s.z0, *s.zT), pg, SwitchMode::as, dcflow::Condition4Mode::assumption);
  CHECK_FALSE(syn.condition5);
}

TEST_CASE("property metrics on a hand-computed path") {
  // One property: 0 -> 3 -> 1. Envelope [0, 1], overshoot 2 at t = 1.
  const std::vector<std::vector<double>> P{{0.0}, {3.0}, {1.0}};
  PropertyMetrics m = property_metrics(P, {1.0}, {1.0}, {});
  CHECK(m.H_b == doctest::Approx(2.0));
  CHECK(m.H_b_l1 == doctest::Approx(2.0));
  CHECK(m.H_v == doctest::Approx(4.0));  // 3 + 2 - |0 - 1|
  m = property_metrics(P, {1.0}, {1.0}, {2.0});
  CHECK(m.H_b == doctest::Approx(std::sqrt(8.0)));
  CHECK(m.H_b_l1 == doctest::Approx(4.0));

  // Two properties with weights; the second stays inside its envelope.
  const std::vector<std::vector<double>> Q{{1.0, 0.0}, {-1.0, 0.5}, {2.0, 1.0}, {1.5, 1.0}};
  m = property_metrics(Q, {3.0, 1.0}, {0.5, 2.0}, {});
  // Overshoot of property 0: 2 below at t=1, 0.5 above at t=2.
  CHECK(m.H_b_l1 == doctest::Approx(3.0 * 2.0 + 3.0 * 0.5));
  CHECK(m.H_b == doctest::Approx(std::sqrt(3.0 * 4.0 + 3.0 * 0.25)));
  CHECK(m.H_v == doctest::Approx(0.5 * (2.0 + 3.0 + 0.5 - 0.5) + 2.0 * (0.5 + 0.5 + 0.0 - 1.0)));
  CHECK_THROWS_AS(property_metrics(Q, {1.0}, {1.0, 1.0}, {}), InvalidInput);
}

TEST_CASE("volatility is nonnegative and boundedness vanishes on monotone paths") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t T = 1 + trial % 5, K = 3;
    std::vector<std::vector<double>> P(T + 1, std::vector<double>(K));
    for (auto& p : P)
      for (double& v : p) v = u(rng);
    const PropertyMetrics m = property_metrics(P, {1.0, 2.0, 0.5}, {1.0, 1.0, 3.0}, {});
    CHECK(m.H_v >= 0.0);
    CHECK(m.H_b >= 0.0);
    // A sorted path never leaves its envelope and never backtracks.
    for (std::size_t k = 0; k < K; ++k) {
      std::vector<double> col;
      for (auto& p : P) col.push_back(p[k]);
      std::sort(col.begin(), col.end());
      for (std::size_t t = 0; t <= T; ++t) P[t][k] = col[t];
    }
    const PropertyMetrics s = property_metrics(P, {1.0, 2.0, 0.5}, {1.0, 1.0, 3.0}, {});
    CHECK(s.H_b == doctest::Approx(0.0));
    CHECK(s.H_v == doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("switching cost and batch count") {
  const Scenario s = ott::testing::five_bus_scenario();
  const std::vector<double> pg = dispatch_at(s.grid, *s.zT);
  for (const Trajectory& t : {adhoc_syn(s.z0, *s.zT), adhoc_one(s.z0, *s.zT)}) {
    const MetricReport r = metrics(s.grid, t, pg, {});
    double cost = 0.0;
    for (std::size_t e : changed_branches(s.z0, *s.zT)) cost += s.grid.branch(e).switch_cost;
    CHECK(r.H_c == doctest::Approx(cost));
    CHECK(r.H_n == static_cast<double>(t.T()));
  }
}

TEST_CASE("exhaustive intermediate checks see at least what the assumption check sees") {
  const Scenario s = ott::testing::five_bus_tight_scenario(0.8);
  const std::vector<double> pg = dispatch_at(s.grid, *s.zT);
  for (const auto& blocks : ott::testing::ordered_set_partitions(changed_branches(s.z0, *s.zT), 3)) {
    const Trajectory t = ott::testing::trajectory_from_blocks(s.z0, blocks);
    const MetricReport a = validate_trajectory(s.grid, t, pg, SwitchMode::ss, dcflow::Condition4Mode::assumption);
    const MetricReport x = validate_trajectory(s.grid, t, pg, SwitchMode::ss, dcflow::Condition4Mode::exhaustive);
    CHECK(a.condition1 == x.condition1);
    if (!x.condition4) continue;
    // No variant violates, so in particular the all-openings-first one is clean
    // whenever it is a variant (the batch closes something).
    for (std::size_t k = 0; k < t.T(); ++k) {
      bool closes = false;
      for (std::size_t e : changed_branches(t.topologies[k], t.topologies[k + 1])) closes = closes || t.topologies[k + 1][e];
      if (closes) CHECK(a.batches[k].intermediate_violation <= dcflow::kLimitTolerance);
    }
  }
}

TEST_CASE("trajectory json round trip") {
  const Scenario s = ott::testing::five_bus_scenario();
  Trajectory t = adhoc_one(s.z0, *s.zT);
  t.durations = {1.0, 2.0, 0.5, 1.5};
  const nlohmann::json j = trajectory_to_json(s.grid, t);
  const Trajectory u = trajectory_from_json(j);
  CHECK(u.topologies == t.topologies);
  CHECK(u.durations == t.durations);
  CHECK(u.duration(2) == 2.0);
  nlohmann::json bad = j;
  bad["durations"] = {1.0};
  CHECK_THROWS_AS(trajectory_from_json(bad), InvalidInput);
  CHECK_THROWS_AS(trajectory_from_json(nlohmann::json::object({{"topologies", nlohmann::json::array()}})),
                  InvalidInput);
}

TEST_CASE("validation rejects malformed input") {
  const Scenario s = ott::testing::five_bus_scenario();
  const Trajectory t = adhoc_syn(s.z0, *s.zT);
  CHECK_THROWS_AS(validate_trajectory(s.grid, t, {1.0}, SwitchMode::ss, dcflow::Condition4Mode::assumption),
                  InvalidInput);
  Trajectory d = t;
  d.durations = {1.0, 1.0, 1.0};
  CHECK_THROWS_AS(validate_trajectory(s.grid, d, dispatch_at(s.grid, s.z0), SwitchMode::ss,
                                      dcflow::Condition4Mode::assumption),
                  InvalidInput);
}
