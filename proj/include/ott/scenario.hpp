#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ott/grid.hpp"
#include "ott/solver_driver.hpp"

namespace ott {

// A transition scenario: a case, its initial topology and optionally a fixed
// terminal topology and dispatch. The case path is resolved relative to the
// scenario file; "case" may also hold an inline case object.
struct Scenario {
  std::string id;
  GridCase grid;
  Topology z0;
  std::optional<Topology> zT;
  std::optional<std::vector<double>> pg;
};

Scenario scenario_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {},
                            double load_scale = 1.0);
Scenario load_scenario(const std::filesystem::path& path, double load_scale = 1.0);

// Minimum-cost dispatch at a fixed topology (OTS with no switching allowed),
// balanced to dcflow tolerance. Throws InvalidInput when none exists.
std::vector<double> dispatch_at(const GridCase& grid, const Topology& z, const DriverOptions& opts = {});

nlohmann::json read_json_file(const std::filesystem::path& path);
// Balanced dispatch from a JSON array or an object with a "pg" member.
std::vector<double> dispatch_from_json(const GridCase& grid, const nlohmann::json& j);

}  // namespace ott
