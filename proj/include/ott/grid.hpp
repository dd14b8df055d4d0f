#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace ott {

struct Bus {
  int id = 0;
  double p_d = 0.0;            // load, per unit
  double p_g_min = 0.0;        // generator bounds, per unit
  double p_g_max = 0.0;
  double cost_linear = 0.0;    // cost = cost_linear * p + cost_quadratic * p^2
  double cost_quadratic = 0.0;
};

struct Branch {
  int id = 0;
  int from = 0;  // bus ids; orientation is from -> to
  int to = 0;
  double b = 1.0;                  // 1 / reactance
  double p_max = 1.0;              // normal flow limit
  double p_max_relaxed = 1.0;      // emergency flow limit
  double theta_max = 1.0;          // normal angle-difference limit, rad
  double theta_max_relaxed = 1.0;  // emergency angle-difference limit, rad
  bool switchable = false;
  double switch_cost = 1.0;
  bool initial_status = true;      // status in the case file's base topology
};

// Binary branch-status vector indexed by branch order (1 = switched on).
class Topology {
 public:
  Topology() = default;
  explicit Topology(std::vector<std::uint8_t> z) : z_(std::move(z)) {}
  Topology(std::size_t n, bool on) : z_(n, on ? 1 : 0) {}

  std::size_t size() const { return z_.size(); }
  bool operator[](std::size_t e) const { return z_[e] != 0; }
  void set(std::size_t e, bool on) { z_[e] = on ? 1 : 0; }
  const std::vector<std::uint8_t>& bits() const { return z_; }
  std::size_t count_on() const;

  friend bool operator==(const Topology&, const Topology&) = default;
  friend auto operator<=>(const Topology&, const Topology&) = default;

 private:
  std::vector<std::uint8_t> z_;
};

// Per-branch switch action: +1 closes, -1 opens, 0 leaves the branch alone.
using SwitchDelta = std::vector<std::int8_t>;

// Static network data. Construct through `GridCase::from_json` or
// `GridCase::build`, both of which validate; instances are immutable after.
class GridCase {
 public:
  static GridCase build(std::vector<Bus> buses, std::vector<Branch> branches,
                        std::vector<std::vector<int>> agents, int reference_bus_id);
  static GridCase from_json(const nlohmann::json& j);
  static GridCase load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  std::size_t num_buses() const { return buses_.size(); }
  std::size_t num_branches() const { return branches_.size(); }
  const std::vector<Bus>& buses() const { return buses_; }
  const std::vector<Branch>& branches() const { return branches_; }
  const Bus& bus(std::size_t i) const { return buses_[i]; }
  const Branch& branch(std::size_t e) const { return branches_[e]; }

  // Bus indices (0-based, record order) of each branch endpoint.
  std::size_t from_index(std::size_t e) const { return from_idx_[e]; }
  std::size_t to_index(std::size_t e) const { return to_idx_[e]; }
  std::size_t reference_index() const { return reference_; }

  std::size_t bus_index(int id) const;
  std::size_t branch_index(int id) const;

  // Agent partition as lists of branch indices; empty when no agents given.
  const std::vector<std::vector<std::size_t>>& agents() const { return agents_; }
  std::size_t num_agents() const { return agents_.size(); }
  // Agent owning branch `e`, or npos for unswitchable branches.
  std::size_t agent_of(std::size_t e) const { return agent_of_[e]; }
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::vector<std::size_t> switchable_branches() const;

  // Base topology from the branches' `status` field.
  Topology initial_topology() const;

  // Throws InvalidInput when `z` has the wrong length or an unswitchable
  // branch is off.
  void check_topology(const Topology& z) const;

  // Same network with every load multiplied by `factor`.
  GridCase with_load_scale(double factor) const;

 private:
  void validate_and_index();

  std::vector<Bus> buses_;
  std::vector<Branch> branches_;
  std::vector<std::vector<std::size_t>> agents_;
  std::vector<std::size_t> agent_of_;
  std::vector<std::size_t> from_idx_;
  std::vector<std::size_t> to_idx_;
  std::size_t reference_ = 0;
};

// Oriented incidence matrix, |V| x |E|, entries in {-1, 0, +1}; row-major.
struct IncidenceMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::int8_t> entries;
  int operator()(std::size_t r, std::size_t c) const { return entries[r * cols + c]; }
};

IncidenceMatrix incidence_matrix(const GridCase& grid);

// Graph search over switched-on branches; true iff one component spans all
// buses.
bool is_connected(const GridCase& grid, const Topology& z);

// Component-wise product: branches on in both topologies.
Topology intersection_topology(const Topology& a, const Topology& b);

// Branches whose status differs (the symmetric difference).
std::vector<std::size_t> changed_branches(const Topology& a, const Topology& b);

std::size_t hamming_distance(const Topology& a, const Topology& b);

// Topology obtained by applying `delta` to `z`.
Topology apply_delta(const Topology& z, const SwitchDelta& delta);

// The intermediate-topology variants of a switching batch: every partial
// application of the batch's switch vector x = next - prev, that is, every
// delta whose nonzero entries agree with x on a proper subset of its support
// (the zero vector included, x itself excluded). Cardinality 2^k - 1.
//
// The printed set-builder reads "x'_i != 0 => x'_i != x_i", which would
// produce switch actions that are not in the batch; this uses the reading
// "x'_i != 0 => x'_i = x_i" that matches how the set is used for
// intermediate topologies.
class VariantSpace {
 public:
  static constexpr std::size_t kDefaultCap = 20;

  // Throws EnumerationTooLarge when the batch has more than `cap` switches.
  VariantSpace(const Topology& prev, const Topology& next, std::size_t cap = kDefaultCap);

  std::size_t batch_size() const { return support_.size(); }
  // 2^k - 1; zero when prev == next.
  std::uint64_t count() const;
  // Variant `index` in [0, count()): bit i of index applies the i-th switch
  // (support in ascending branch order).
  SwitchDelta delta(std::uint64_t index) const;
  Topology topology(std::uint64_t index) const;
  const std::vector<std::size_t>& support() const { return support_; }

 private:
  Topology prev_;
  std::vector<std::size_t> support_;
  std::vector<std::int8_t> sign_;
};

std::vector<SwitchDelta> intermediate_variants(const Topology& prev, const Topology& next,
                                               std::size_t cap = VariantSpace::kDefaultCap);

// c = (|V|-1, -1, ..., -1) with the reference bus carrying |V|-1; routable
// over the on-branches iff the topology spans all buses.
std::vector<double> uniquely_balanced_vector(const GridCase& grid);

// Longest shortest-path (in hops) over all branches, ignoring status.
std::size_t network_diameter(const GridCase& grid);

nlohmann::json topology_to_json(const Topology& z);
Topology topology_from_json(const nlohmann::json& j);

}  // namespace ott
