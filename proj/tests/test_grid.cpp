#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <queue>
#include <set>

#include "ott/error.hpp"
#include "ott/grid.hpp"
#include "support/cases.hpp"
#include "support/oracles.hpp"

using namespace ott;
using ott::testing::five_bus;

namespace {

Topology bits(std::initializer_list<int> v) {
  std::vector<std::uint8_t> b;
  for (int x : v) b.push_back(static_cast<std::uint8_t>(x));
  return Topology(b);
}

nlohmann::json minimal_case() {
  return nlohmann::json::parse(R"({
    "reference_bus": 1,
    "buses": [{"id": 1, "p_g_max": 2, "cost_linear": 1}, {"id": 2, "p_d": 1}],
    "branches": [
      {"id": 1, "from": 1, "to": 2, "b": 5, "p_max": 2, "theta_max": 0.5},
      {"id": 2, "from": 1, "to": 2, "b": 5, "p_max": 2, "theta_max": 0.5, "switchable": true, "status": 0}
    ]
  })");
}

}  // namespace

TEST_CASE("case json round trip keeps every field") {
  const GridCase g = five_bus();
  const GridCase h = GridCase::from_json(g.to_json());
  REQUIRE(h.num_buses() == g.num_buses());
  REQUIRE(h.num_branches() == g.num_branches());
  for (std::size_t i = 0; i < g.num_buses(); ++i) {
    CHECK(h.bus(i).id == g.bus(i).id);
    CHECK(h.bus(i).p_d == g.bus(i).p_d);
    CHECK(h.bus(i).p_g_max == g.bus(i).p_g_max);
    CHECK(h.bus(i).cost_linear == g.bus(i).cost_linear);
  }
  for (std::size_t e = 0; e < g.num_branches(); ++e) {
    const Branch &a = g.branch(e), &b = h.branch(e);
    CHECK(a.from == b.from);
    CHECK(a.to == b.to);
    CHECK(a.b == b.b);
    CHECK(a.p_max_relaxed == b.p_max_relaxed);
    CHECK(a.theta_max_relaxed == b.theta_max_relaxed);
    CHECK(a.switchable == b.switchable);
    CHECK(a.initial_status == b.initial_status);
    CHECK(h.agent_of(e) == g.agent_of(e));
  }
  CHECK(h.reference_index() == g.reference_index());
  CHECK(h.initial_topology() == g.initial_topology());
}

TEST_CASE("optional fields take defaults") {
  const GridCase g = GridCase::from_json(minimal_case());
  CHECK(g.branch(0).p_max_relaxed == 2.0);
  CHECK(g.branch(0).theta_max_relaxed == 0.5);
  CHECK_FALSE(g.branch(0).switchable);
  CHECK(g.branch(1).switchable);
  CHECK(g.initial_topology() == bits({1, 0}));
  CHECK(g.num_agents() == 0);
  CHECK(g.switchable_branches() == std::vector<std::size_t>{1});
}

TEST_CASE("malformed cases are rejected") {
  auto rejects = [](auto mutate) {
    nlohmann::json j = minimal_case();
    mutate(j);
    CHECK_THROWS_AS(GridCase::from_json(j), InvalidInput);
  };
  rejects([](nlohmann::json& j) { j["buses"][1]["id"] = 1; });
  rejects([](nlohmann::json& j) { j["reference_bus"] = 9; });
  rejects([](nlohmann::json& j) { j["branches"][0].erase("b"); });
  rejects([](nlohmann::json& j) { j["branches"][0]["to"] = 7; });
  rejects([](nlohmann::json& j) { j["branches"][0]["to"] = 1; });
  rejects([](nlohmann::json& j) { j["branches"][0]["b"] = -1.0; });
  rejects([](nlohmann::json& j) { j["branches"][0]["p_max_relaxed"] = 1.0; });
  rejects([](nlohmann::json& j) { j["branches"][0]["status"] = 0; });
  rejects([](nlohmann::json& j) { j["branches"][1]["id"] = 1; });
  rejects([](nlohmann::json& j) { j["buses"][0]["p_g_min"] = 3.0; });
  rejects([](nlohmann::json& j) { j["buses"][0]["cost_quadratic"] = -1.0; });
  rejects([](nlohmann::json& j) { j["agents"] = {{1}}; });        // unswitchable owner
  rejects([](nlohmann::json& j) { j["agents"] = {{2}, {2}}; });   // overlap
  rejects([](nlohmann::json& j) { j["agents"] = {{5}}; });        // unknown id
  rejects([](nlohmann::json& j) { j.erase("branches"); });
}

TEST_CASE("agents must cover every switchable branch") {
  nlohmann::json j = minimal_case();
  j["branches"].push_back({{"id", 3}, {"from", 1}, {"to", 2}, {"b", 5}, {"p_max", 2}, {"theta_max", 0.5},
                           {"switchable", true}});
  j["agents"] = {{2}};
  CHECK_THROWS_AS(GridCase::from_json(j), InvalidInput);
  j["agents"] = {{2}, {3}};
  const GridCase g = GridCase::from_json(j);
  CHECK(g.agent_of(1) == 0);
  CHECK(g.agent_of(2) == 1);
  CHECK(g.agent_of(0) == GridCase::npos);
}

TEST_CASE("topology checks") {
  const GridCase g = five_bus();
  CHECK_NOTHROW(g.check_topology(g.initial_topology()));
  CHECK_THROWS_AS(g.check_topology(bits({1, 1, 1})), InvalidInput);
  CHECK_THROWS_AS(g.check_topology(bits({0, 1, 1, 1, 0, 0, 0})), InvalidInput);
  CHECK_THROWS_AS(topology_from_json(nlohmann::json{1, 2}), InvalidInput);
  CHECK_THROWS_AS(topology_from_json(nlohmann::json("x")), InvalidInput);
  CHECK(topology_from_json(topology_to_json(bits({1, 0, 1}))) == bits({1, 0, 1}));
}

TEST_CASE("incidence matrix columns carry one +1 at the from bus and one -1 at the to bus") {
  const GridCase g = five_bus();
  const IncidenceMatrix E = incidence_matrix(g);
  REQUIRE(E.rows == g.num_buses());
  REQUIRE(E.cols == g.num_branches());
  for (std::size_t e = 0; e < E.cols; ++e) {
    int sum = 0, nonzero = 0;
    for (std::size_t v = 0; v < E.rows; ++v) {
      sum += E(v, e);
      nonzero += E(v, e) != 0;
    }
    CHECK(sum == 0);
    CHECK(nonzero == 2);
    CHECK(E(g.from_index(e), e) == 1);
    CHECK(E(g.to_index(e), e) == -1);
  }
}

TEST_CASE("graph search agrees with union-find on every topology") {
  for (const GridCase& g : ott::testing::connectivity_graphs()) {
    const std::size_t k = g.num_branches();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
      Topology z(k, false);
      for (std::size_t e = 0; e < k; ++e) z.set(e, (mask >> e) & 1);
      REQUIRE(is_connected(g, z) == ott::testing::spans_all_buses(g, z));
    }
  }
}

TEST_CASE("set operations on topologies") {
  const Topology a = bits({1, 1, 0, 0}), b = bits({1, 0, 1, 0});
  CHECK(intersection_topology(a, b) == bits({1, 0, 0, 0}));
  CHECK(changed_branches(a, b) == std::vector<std::size_t>{1, 2});
  CHECK(hamming_distance(a, b) == 2);
  CHECK(apply_delta(a, {0, -1, 1, 0}) == b);
  CHECK_THROWS_AS(apply_delta(a, {1, 0, 0, 0}), InvalidInput);
  CHECK_THROWS_AS(apply_delta(a, {0, 0}), InvalidInput);
  CHECK_THROWS_AS(intersection_topology(a, bits({1})), InvalidInput);
}

TEST_CASE("variant space enumerates every partial batch exactly once") {
  const Topology prev = bits({1, 1, 1, 1, 0, 0, 0}), next = bits({1, 0, 0, 1, 1, 1, 1});
  const VariantSpace space(prev, next);
  REQUIRE(space.batch_size() == 5);
  REQUIRE(space.count() == 31);
  std::set<Topology> seen;
  const Topology lo = intersection_topology(prev, next);
  for (std::uint64_t i = 0; i < space.count(); ++i) {
    const Topology z = space.topology(i);
    CHECK(apply_delta(prev, space.delta(i)) == z);
    for (std::size_t e = 0; e < z.size(); ++e) {
      // Every variant sits between the intersection and the union.
      CHECK((!lo[e] || z[e]));
      CHECK((!z[e] || prev[e] || next[e]));
    }
    CHECK(z != next);
    seen.insert(z);
  }
  CHECK(seen.size() == 31);
  CHECK(seen.count(prev) == 1);
  CHECK(intermediate_variants(prev, next).size() == 31);
  CHECK(VariantSpace(prev, prev).count() == 0);
  CHECK_THROWS_AS(VariantSpace(prev, next, 4), EnumerationTooLarge);
}

TEST_CASE("uniquely balanced vector") {
  const GridCase g = five_bus();
  const std::vector<double> c = uniquely_balanced_vector(g);
  double sum = 0.0;
  for (double v : c) sum += v;
  CHECK(sum == 0.0);
  CHECK(c[g.reference_index()] == 4.0);
}

TEST_CASE("network diameter matches breadth-first distances") {
  CHECK(network_diameter(ott::testing::ring_with_chords(6, {})) == 3);
  CHECK(network_diameter(ott::testing::ring_with_chords(7, {})) == 3);
  CHECK(network_diameter(ott::testing::ring_with_chords(6, {{1, 4}, {2, 5}, {3, 6}})) == 2);
  CHECK(network_diameter(ott::testing::two_bus()) == 1);
}

TEST_CASE("load scaling") {
  const GridCase g = five_bus();
  const GridCase h = g.with_load_scale(1.5);
  for (std::size_t i = 0; i < g.num_buses(); ++i) {
    CHECK(h.bus(i).p_d == doctest::Approx(1.5 * g.bus(i).p_d));
    CHECK(h.bus(i).p_g_max == g.bus(i).p_g_max);
  }
}
