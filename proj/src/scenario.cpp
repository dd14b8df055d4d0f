#include "ott/scenario.hpp"

#include <fstream>

#include "ott/dcflow.hpp"
#include "ott/error.hpp"

namespace ott {

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
}

std::vector<double> dispatch_from_json(const GridCase& grid, const nlohmann::json& j) {
  const nlohmann::json& arr = j.is_object() ? j.at("pg") : j;
  if (!arr.is_array()) throw InvalidInput("dispatch must be an array");
  auto pg = arr.get<std::vector<double>>();
  if (pg.size() != grid.num_buses()) throw InvalidInput("dispatch size does not match the case");
  // Printed dispatches carry 9 significant digits; rebalance before use.
  return dcflow::balance_dispatch(grid, std::move(pg));
}

Scenario scenario_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir, double load_scale) {
  if (!j.is_object()) throw InvalidInput("scenario must be an object");
  Scenario s;
  s.id = j.value("id", std::string("scenario"));
  const auto c = j.find("case");
  if (c == j.end()) throw InvalidInput("scenario: missing field 'case'");
  GridCase base = c->is_string() ? GridCase::load(base_dir / c->get<std::string>()) : GridCase::from_json(*c);
  s.grid = load_scale == 1.0 ? std::move(base) : base.with_load_scale(load_scale);
  s.z0 = j.contains("z0") ? topology_from_json(j["z0"]) : s.grid.initial_topology();
  s.grid.check_topology(s.z0);
  if (j.contains("zT")) {
    s.zT = topology_from_json(j["zT"]);
    s.grid.check_topology(*s.zT);
  }
  if (j.contains("pg")) s.pg = dispatch_from_json(s.grid, j["pg"]);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path, double load_scale) {
  Scenario s = scenario_from_json(read_json_file(path), path.parent_path(), load_scale);
  if (s.id == "scenario") s.id = path.stem().string();
  return s;
}

std::vector<double> dispatch_at(const GridCase& grid, const Topology& z, const DriverOptions& opts) {
  const OtsResult r = solve_ots(grid, z, 0, 0, opts);
  if (!r.has_solution()) throw InvalidInput("no feasible dispatch at the given topology");
  return r.solution.pg;
}

}  // namespace ott
