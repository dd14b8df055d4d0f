#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "ott/milp/lp.hpp"
#include "ott/milp/model.hpp"

namespace ott::milp {

struct NodeInfo {
  std::size_t id = 0;
  std::size_t depth = 0;
  double parent_bound = -kInf;
  double lp_objective = kInf;  // +inf when the node LP is infeasible
  double incumbent = kInf;
};

struct BbOptions {
  double gap = 1e-6;  // relative, denominator max(1, |incumbent|)
  double integrality_tol = 1e-6;
  double feasibility_tol = 1e-6;  // warm-start acceptance
  std::size_t node_limit = 1'000'000;
  double time_limit_seconds = kInf;
  LpOptions lp;
  std::function<void(const NodeInfo&)> observer;
};

// Best-bound branch and bound, most-fractional branching with lowest-index
// ties, newest node first on bound ties. Single worker, so the node order and
// the incumbent are fully determined by the model. Throws InvalidInput when
// `warm_start` is given but violates the model by more than feasibility_tol.
SolveOutcome solve_bb(const MilpModel& model, const std::optional<std::vector<double>>& warm_start = {},
                      const BbOptions& options = {});

inline constexpr std::size_t kBruteForceMaxBinaries = 22;

// Enumerates every assignment of the free binaries (those not fixed at the
// root), solving the continuous LP at each leaf; rows over binaries alone are
// used to prune partial assignments. Ties keep the first assignment in
// enumeration order. Throws EnumerationTooLarge above `max_binaries`.
SolveOutcome brute_force_binary(const MilpModel& model,
                                std::size_t max_binaries = kBruteForceMaxBinaries, LpOptions lp = {});

// Single-threaded reference for brute_force_binary.
SolveOutcome brute_force_binary_serial(const MilpModel& model,
                                       std::size_t max_binaries = kBruteForceMaxBinaries,
                                       LpOptions lp = {});

}  // namespace ott::milp
