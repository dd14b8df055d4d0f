#pragma once

#include <vector>

#include "ott/grid.hpp"

namespace ott::dcflow {

// Nodal-balance tolerance for accepting a dispatch.
inline constexpr double kBalanceTolerance = 1e-8;
// Reduced-matrix pivots below this mean the topology is numerically split.
inline constexpr double kPivotThreshold = 1e-10;
// Limit excess below this counts as no violation.
inline constexpr double kLimitTolerance = 1e-7;

struct FlowState {
  std::vector<double> theta;  // bus angles, reference bus = 0
  std::vector<double> p_l;    // branch flows (0 on off branches)
  std::vector<double> p_g;    // generation used for the solve

  // Angle difference across branch e (defined for off branches too).
  double angle_difference(const GridCase& grid, std::size_t e) const {
    return theta[grid.from_index(e)] - theta[grid.to_index(e)];
  }
};

struct ViolationReport {
  std::vector<double> angle;  // per branch excess over the angle limit
  std::vector<double> flow;   // per branch excess over the flow limit
  double total = 0.0;

  bool clean() const { return total <= kLimitTolerance; }
};

enum class LimitSet { normal, relaxed };

// DC steady state for a fixed topology and dispatch. Throws Disconnected when
// the on-branches do not span the buses (or the reduced system is singular
// at kPivotThreshold) and PowerImbalance when sum(p_g - p_d) exceeds
// kBalanceTolerance.
FlowState solve_dc_flow(const GridCase& grid, const Topology& z, const std::vector<double>& p_g);

ViolationReport check_limits(const GridCase& grid, const Topology& z, const FlowState& state,
                             LimitSet limits);

// Largest per-bus |E p_l - p_g + p_d|.
double balance_residual(const GridCase& grid, const FlowState& state);

// Connected and free of normal-limit violations at the fixed dispatch.
bool condition2_feasible(const GridCase& grid, const Topology& z, const std::vector<double>& p_g);

enum class Condition4Mode { exhaustive, assumption };

// Intermediate-topology feasibility of the batch prev -> next under relaxed
// limits: every partial application of the batch (exhaustive) or only the
// all-openings-first intersection topology (assumption).
bool condition4_feasible(const GridCase& grid, const Topology& prev, const Topology& next,
                         const std::vector<double>& p_g, Condition4Mode mode,
                         std::size_t cap = VariantSpace::kDefaultCap);

// Connected and relaxed-limit clean.
bool relaxed_feasible(const GridCase& grid, const Topology& z, const std::vector<double>& p_g);

double dispatch_cost(const GridCase& grid, const std::vector<double>& p_g);

// Shifts a dispatch that is balanced to within `slack` onto exact balance by
// moving the residual to generators with headroom, largest headroom first.
// Used to clean up solver output before freezing it as p_g*.
std::vector<double> balance_dispatch(const GridCase& grid, std::vector<double> p_g,
                                     double slack = 1e-5);

}  // namespace ott::dcflow
