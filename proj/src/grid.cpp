#include "ott/grid.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <queue>
#include <sstream>
#include <unordered_map>

#include "ott/error.hpp"

namespace ott {

namespace {

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  return it->get<T>();
}

template <typename T>
T require(const nlohmann::json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw InvalidInput(where + ": missing field '" + key + "'");
  return it->get<T>();
}

}  // namespace

std::size_t Topology::count_on() const {
  return static_cast<std::size_t>(std::count(z_.begin(), z_.end(), std::uint8_t{1}));
}

GridCase GridCase::build(std::vector<Bus> buses, std::vector<Branch> branches,
                         std::vector<std::vector<int>> agents, int reference_bus_id) {
  GridCase g;
  g.buses_ = std::move(buses);
  g.branches_ = std::move(branches);
  std::unordered_map<int, std::size_t> bus_ix;
  for (std::size_t i = 0; i < g.buses_.size(); ++i) {
    if (!bus_ix.emplace(g.buses_[i].id, i).second)
      throw InvalidInput("duplicate bus id " + std::to_string(g.buses_[i].id));
  }
  auto ref = bus_ix.find(reference_bus_id);
  if (ref == bus_ix.end())
    throw InvalidInput("reference bus " + std::to_string(reference_bus_id) + " does not exist");
  g.reference_ = ref->second;

  std::unordered_map<int, std::size_t> branch_ix;
  for (std::size_t e = 0; e < g.branches_.size(); ++e) {
    if (!branch_ix.emplace(g.branches_[e].id, e).second)
      throw InvalidInput("duplicate branch id " + std::to_string(g.branches_[e].id));
  }
  for (const auto& set : agents) {
    std::vector<std::size_t> idx;
    for (int id : set) {
      auto it = branch_ix.find(id);
      if (it == branch_ix.end())
        throw InvalidInput("agent references unknown branch " + std::to_string(id));
      idx.push_back(it->second);
    }
    std::sort(idx.begin(), idx.end());
    g.agents_.push_back(std::move(idx));
  }
  g.validate_and_index();
  return g;
}

void GridCase::validate_and_index() {
  if (buses_.empty()) throw InvalidInput("case has no buses");
  std::unordered_map<int, std::size_t> bus_ix;
  for (std::size_t i = 0; i < buses_.size(); ++i) bus_ix.emplace(buses_[i].id, i);
  from_idx_.clear();
  to_idx_.clear();
  for (const Branch& br : branches_) {
    const std::string where = "branch " + std::to_string(br.id);
    auto f = bus_ix.find(br.from);
    auto t = bus_ix.find(br.to);
    if (f == bus_ix.end() || t == bus_ix.end())
      throw InvalidInput(where + ": endpoint bus does not exist");
    if (br.from == br.to) throw InvalidInput(where + ": from-bus equals to-bus");
    if (!(br.b > 0.0) || !(br.p_max > 0.0) || !(br.theta_max > 0.0))
      throw InvalidInput(where + ": b, p_max and theta_max must be positive");
    if (br.p_max_relaxed < br.p_max || br.theta_max_relaxed < br.theta_max)
      throw InvalidInput(where + ": relaxed limits must dominate normal limits");
    if (br.switch_cost < 0.0) throw InvalidInput(where + ": negative switch cost");
    if (!br.switchable && !br.initial_status)
      throw InvalidInput(where + ": unswitchable branch cannot start open");
    from_idx_.push_back(f->second);
    to_idx_.push_back(t->second);
  }
  for (const Bus& bus : buses_) {
    if (bus.p_g_min > bus.p_g_max)
      throw InvalidInput("bus " + std::to_string(bus.id) + ": p_g_min exceeds p_g_max");
    if (bus.cost_quadratic < 0.0)
      throw InvalidInput("bus " + std::to_string(bus.id) + ": cost must be convex");
  }

  agent_of_.assign(branches_.size(), npos);
  if (!agents_.empty()) {
    for (std::size_t a = 0; a < agents_.size(); ++a) {
      for (std::size_t e : agents_[a]) {
        if (agent_of_[e] != npos)
          throw InvalidInput("agent sets overlap on branch " + std::to_string(branches_[e].id));
        if (!branches_[e].switchable)
          throw InvalidInput("agent owns unswitchable branch " + std::to_string(branches_[e].id));
        agent_of_[e] = a;
      }
    }
    for (std::size_t e = 0; e < branches_.size(); ++e) {
      if (branches_[e].switchable && agent_of_[e] == npos)
        throw InvalidInput("switchable branch " + std::to_string(branches_[e].id) +
                           " belongs to no agent");
    }
  }
}

GridCase GridCase::from_json(const nlohmann::json& j) {
  std::vector<Bus> buses;
  for (const auto& jb : require<nlohmann::json>(j, "buses", "case")) {
    Bus b;
    b.id = require<int>(jb, "id", "bus");
    b.p_d = get_or(jb, "p_d", 0.0);
    b.p_g_min = get_or(jb, "p_g_min", 0.0);
    b.p_g_max = get_or(jb, "p_g_max", 0.0);
    b.cost_linear = get_or(jb, "cost_linear", 0.0);
    b.cost_quadratic = get_or(jb, "cost_quadratic", 0.0);
    buses.push_back(b);
  }
  std::vector<Branch> branches;
  for (const auto& jl : require<nlohmann::json>(j, "branches", "case")) {
    Branch br;
    br.id = require<int>(jl, "id", "branch");
    const std::string where = "branch " + std::to_string(br.id);
    br.from = require<int>(jl, "from", where);
    br.to = require<int>(jl, "to", where);
    br.b = require<double>(jl, "b", where);
    br.p_max = require<double>(jl, "p_max", where);
    br.p_max_relaxed = get_or(jl, "p_max_relaxed", br.p_max);
    br.theta_max = require<double>(jl, "theta_max", where);
    br.theta_max_relaxed = get_or(jl, "theta_max_relaxed", br.theta_max);
    br.switchable = get_or(jl, "switchable", false);
    br.switch_cost = get_or(jl, "switch_cost", 1.0);
    br.initial_status = get_or(jl, "status", 1) != 0;
    branches.push_back(br);
  }
  std::vector<std::vector<int>> agents;
  if (auto it = j.find("agents"); it != j.end() && !it->is_null())
    agents = it->get<std::vector<std::vector<int>>>();
  const int ref = require<int>(j, "reference_bus", "case");
  return build(std::move(buses), std::move(branches), std::move(agents), ref);
}

GridCase GridCase::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open case file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw InvalidInput("case file " + path.string() + ": " + ex.what());
  }
  return from_json(j);
}

nlohmann::json GridCase::to_json() const {
  nlohmann::json j;
  j["reference_bus"] = buses_[reference_].id;
  auto& jb = j["buses"] = nlohmann::json::array();
  for (const Bus& b : buses_) {
    jb.push_back({{"id", b.id},
                  {"p_d", b.p_d},
                  {"p_g_min", b.p_g_min},
                  {"p_g_max", b.p_g_max},
                  {"cost_linear", b.cost_linear},
                  {"cost_quadratic", b.cost_quadratic}});
  }
  auto& jl = j["branches"] = nlohmann::json::array();
  for (const Branch& br : branches_) {
    jl.push_back({{"id", br.id},
                  {"from", br.from},
                  {"to", br.to},
                  {"b", br.b},
                  {"p_max", br.p_max},
                  {"p_max_relaxed", br.p_max_relaxed},
                  {"theta_max", br.theta_max},
                  {"theta_max_relaxed", br.theta_max_relaxed},
                  {"switchable", br.switchable},
                  {"switch_cost", br.switch_cost},
                  {"status", br.initial_status ? 1 : 0}});
  }
  auto& ja = j["agents"] = nlohmann::json::array();
  for (const auto& set : agents_) {
    nlohmann::json ids = nlohmann::json::array();
    for (std::size_t e : set) ids.push_back(branches_[e].id);
    ja.push_back(ids);
  }
  return j;
}

std::size_t GridCase::bus_index(int id) const {
  for (std::size_t i = 0; i < buses_.size(); ++i)
    if (buses_[i].id == id) return i;
  throw InvalidInput("unknown bus id " + std::to_string(id));
}

std::size_t GridCase::branch_index(int id) const {
  for (std::size_t e = 0; e < branches_.size(); ++e)
    if (branches_[e].id == id) return e;
  throw InvalidInput("unknown branch id " + std::to_string(id));
}

std::vector<std::size_t> GridCase::switchable_branches() const {
  std::vector<std::size_t> out;
  for (std::size_t e = 0; e < branches_.size(); ++e)
    if (branches_[e].switchable) out.push_back(e);
  return out;
}

Topology GridCase::initial_topology() const {
  Topology z(branches_.size(), true);
  for (std::size_t e = 0; e < branches_.size(); ++e) z.set(e, branches_[e].initial_status);
  return z;
}

void GridCase::check_topology(const Topology& z) const {
  if (z.size() != branches_.size())
    throw InvalidInput("topology has " + std::to_string(z.size()) + " entries, case has " +
                       std::to_string(branches_.size()) + " branches");
  for (std::size_t e = 0; e < branches_.size(); ++e)
    if (!branches_[e].switchable && !z[e])
      throw InvalidInput("unswitchable branch " + std::to_string(branches_[e].id) + " is off");
}

GridCase GridCase::with_load_scale(double factor) const {
  GridCase g = *this;
  for (Bus& b : g.buses_) b.p_d *= factor;
  return g;
}

IncidenceMatrix incidence_matrix(const GridCase& grid) {
  IncidenceMatrix m;
  m.rows = grid.num_buses();
  m.cols = grid.num_branches();
  m.entries.assign(m.rows * m.cols, 0);
  for (std::size_t e = 0; e < m.cols; ++e) {
    m.entries[grid.from_index(e) * m.cols + e] = 1;
    m.entries[grid.to_index(e) * m.cols + e] = -1;
  }
  return m;
}

bool is_connected(const GridCase& grid, const Topology& z) {
  const std::size_t n = grid.num_buses();
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t e = 0; e < grid.num_branches(); ++e) {
    if (!z[e]) continue;
    adj[grid.from_index(e)].push_back(grid.to_index(e));
    adj[grid.to_index(e)].push_back(grid.from_index(e));
  }
  std::vector<bool> seen(n, false);
  std::queue<std::size_t> frontier;
  frontier.push(0);
  seen[0] = true;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const std::size_t u = frontier.front();
    frontier.pop();
    for (std::size_t v : adj[u]) {
      if (seen[v]) continue;
      seen[v] = true;
      ++reached;
      frontier.push(v);
    }
  }
  return reached == n;
}

Topology intersection_topology(const Topology& a, const Topology& b) {
  if (a.size() != b.size()) throw InvalidInput("topology length mismatch");
  Topology out(a.size(), false);
  for (std::size_t e = 0; e < a.size(); ++e) out.set(e, a[e] && b[e]);
  return out;
}

std::vector<std::size_t> changed_branches(const Topology& a, const Topology& b) {
  if (a.size() != b.size()) throw InvalidInput("topology length mismatch");
  std::vector<std::size_t> out;
  for (std::size_t e = 0; e < a.size(); ++e)
    if (a[e] != b[e]) out.push_back(e);
  return out;
}

std::size_t hamming_distance(const Topology& a, const Topology& b) {
  return changed_branches(a, b).size();
}

Topology apply_delta(const Topology& z, const SwitchDelta& delta) {
  if (z.size() != delta.size()) throw InvalidInput("delta length mismatch");
  Topology out = z;
  for (std::size_t e = 0; e < z.size(); ++e) {
    const int v = static_cast<int>(z[e]) + delta[e];
    if (v < 0 || v > 1) throw InvalidInput("delta does not apply to topology");
    out.set(e, v == 1);
  }
  return out;
}

VariantSpace::VariantSpace(const Topology& prev, const Topology& next, std::size_t cap)
    : prev_(prev) {
  support_ = changed_branches(prev, next);
  if (support_.size() > cap)
    throw EnumerationTooLarge("enumeration too large: batch of " +
                              std::to_string(support_.size()) + " switches exceeds cap " +
                              std::to_string(cap));
  for (std::size_t e : support_) sign_.push_back(next[e] ? 1 : -1);
}

std::uint64_t VariantSpace::count() const {
  if (support_.empty()) return 0;
  return (std::uint64_t{1} << support_.size()) - 1;
}

SwitchDelta VariantSpace::delta(std::uint64_t index) const {
  SwitchDelta d(prev_.size(), 0);
  for (std::size_t i = 0; i < support_.size(); ++i)
    if (index >> i & 1U) d[support_[i]] = sign_[i];
  return d;
}

Topology VariantSpace::topology(std::uint64_t index) const {
  Topology z = prev_;
  for (std::size_t i = 0; i < support_.size(); ++i)
    if (index >> i & 1U) z.set(support_[i], sign_[i] > 0);
  return z;
}

std::vector<SwitchDelta> intermediate_variants(const Topology& prev, const Topology& next,
                                               std::size_t cap) {
  VariantSpace space(prev, next, cap);
  std::vector<SwitchDelta> out;
  out.reserve(space.count());
  for (std::uint64_t i = 0; i < space.count(); ++i) out.push_back(space.delta(i));
  return out;
}

std::vector<double> uniquely_balanced_vector(const GridCase& grid) {
  const std::size_t n = grid.num_buses();
  std::vector<double> c(n, -1.0);
  c[grid.reference_index()] = static_cast<double>(n) - 1.0;
  return c;
}

std::size_t network_diameter(const GridCase& grid) {
  const std::size_t n = grid.num_buses();
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t e = 0; e < grid.num_branches(); ++e) {
    adj[grid.from_index(e)].push_back(grid.to_index(e));
    adj[grid.to_index(e)].push_back(grid.from_index(e));
  }
  std::size_t diameter = 0;
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<std::size_t> dist(n, GridCase::npos);
    std::queue<std::size_t> q;
    dist[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const std::size_t u = q.front();
      q.pop();
      for (std::size_t v : adj[u]) {
        if (dist[v] != GridCase::npos) continue;
        dist[v] = dist[u] + 1;
        diameter = std::max(diameter, dist[v]);
        q.push(v);
      }
    }
  }
  return diameter;
}

nlohmann::json topology_to_json(const Topology& z) {
  nlohmann::json j = nlohmann::json::array();
  for (std::size_t e = 0; e < z.size(); ++e) j.push_back(z[e] ? 1 : 0);
  return j;
}

Topology topology_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw InvalidInput("topology must be an array of 0/1");
  std::vector<std::uint8_t> bits;
  for (const auto& v : j) {
    const int b = v.is_boolean() ? (v.get<bool>() ? 1 : 0) : v.get<int>();
    if (b != 0 && b != 1) throw InvalidInput("topology entries must be 0 or 1");
    bits.push_back(static_cast<std::uint8_t>(b));
  }
  return Topology(std::move(bits));
}

}  // namespace ott
