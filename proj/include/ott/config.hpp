#pragma once

#include <filesystem>

#include <json.hpp>

#include "ott/formulations.hpp"
#include "ott/mcheck.hpp"
#include "ott/solver_driver.hpp"

namespace ott {

// Run configuration read from one JSON document. Every section is optional;
// missing keys keep their defaults and unknown keys are rejected.
struct RunConfig {
  OttConfig ott;
  TetopConfig tetop;  // tetop.ott mirrors `ott`
  DriverOptions driver;
  mcheck::RhoOptions rho;
};

RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& c);

}  // namespace ott
