#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ott/grid.hpp"
#include "ott/trajectories.hpp"

namespace ott::mcheck {

// One solved trajectory with the dispatch it was planned for.
struct RhoScenario {
  std::string id;
  const GridCase* grid = nullptr;
  Trajectory trajectory;
  std::vector<double> pg;
};

enum class RhoMode { exhaustive, sample };

struct RhoOptions {
  RhoMode mode = RhoMode::exhaustive;
  std::size_t samples = 10000;  // per batch, sample mode
  std::uint64_t seed = 0;       // batch b draws from mt19937_64(seed + b)
  std::size_t cap = VariantSpace::kDefaultCap;
};

struct RhoBatch {
  std::string scenario;
  std::size_t t = 0;
  std::uint64_t variants = 0;  // |V(z_t - z_{t-1})|
  double violations = 0.0;     // exact count, or estimate variants * hit rate
  std::size_t draws = 0;       // sample mode only
  std::size_t hits = 0;
  double rho() const { return variants == 0 ? 0.0 : violations / static_cast<double>(variants); }
};

struct RhoResult {
  double rho = 0.0;
  double standard_error = 0.0;  // zero in exhaustive mode
  bool no_intermediates = false;  // 0/0, reported as rho = 0
  std::vector<RhoBatch> batches;
};

// An intermediate variant violates when it is disconnected or exceeds the
// relaxed limits at the frozen dispatch.
bool variant_violates(const GridCase& grid, const Topology& z, const std::vector<double>& pg);

// OpenMP over all (batch, variant) pairs.
RhoResult rho_probability(const std::vector<RhoScenario>& scenarios, const RhoOptions& options = {});
// Single-threaded reference with identical results.
RhoResult rho_probability_serial(const std::vector<RhoScenario>& scenarios, const RhoOptions& options = {});

// scenario,t,variants,violations,rho; a final "total" row carries the aggregate.
void write_rho_csv(std::ostream& os, const RhoResult& result);

}  // namespace ott::mcheck
