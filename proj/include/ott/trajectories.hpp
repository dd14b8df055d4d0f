#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ott/dcflow.hpp"
#include "ott/formulations.hpp"
#include "ott/grid.hpp"
#include "ott/milp/model.hpp"

namespace ott {

struct Trajectory {
  std::vector<Topology> topologies;  // z_0 .. z_T
  std::vector<double> durations;     // d_1 .. d_{T-1}; empty means all 1

  std::size_t T() const { return topologies.empty() ? 0 : topologies.size() - 1; }
  double duration(std::size_t t) const;
};

// Topology list plus batch annotations (closed/opened branch ids per step).
nlohmann::json trajectory_to_json(const GridCase& grid, const Trajectory& traj);
Trajectory trajectory_from_json(const nlohmann::json& j);

// Close-all-then-open-all; repeated topologies dropped.
Trajectory adhoc_syn(const Topology& z0, const Topology& zT);
// Per-agent closing batches in partition order, then per-agent opening
// batches; agents without changed lines contribute nothing.
Trajectory adhoc_asy(const GridCase& grid, const Topology& z0, const Topology& zT);
// One switch per batch. Without `order` closings go first, each group in
// ascending branch index; a supplied order must be a permutation of the
// changed branches and is applied verbatim.
Trajectory adhoc_one(const Topology& z0, const Topology& zT,
                     const std::optional<std::vector<std::size_t>>& order = std::nullopt);

// Property-level metrics over the steady-state path P_0..P_T (P_t holds the
// monitored properties at z_t). The envelope comes from P_0 and P_T.
struct PropertyMetrics {
  double H_b = 0.0;     // sqrt(sum_t d_t dP' W_b dP)
  double H_b_l1 = 0.0;  // sum_t d_t w_b' dP, the objective surrogate
  double H_v = 0.0;
};
PropertyMetrics property_metrics(const std::vector<std::vector<double>>& P, const std::vector<double>& w_b,
                                 const std::vector<double>& w_v, const std::vector<double>& durations);

struct BatchCheck {
  std::size_t t = 0;
  bool connected = true;             // z_{t-1} o z_t spans the buses
  double transitional_violation = 0.0;  // normal limits at z_t (t < T)
  double intermediate_violation = 0.0;  // relaxed limits per Condition-4 mode
  std::size_t disconnected_variants = 0;
  bool single_agent = true;
};

struct MetricReport {
  double H_b = 0.0;
  double H_b_l1 = 0.0;
  double H_v = 0.0;
  double H_c = 0.0;
  double H_p = 0.0;
  double H_n = 0.0;
  double H_p_transitional = 0.0;
  double H_p_intermediate = 0.0;

  bool condition1 = true;  // every z_{t-1} o z_t connected
  bool condition2 = true;  // transitional systems within normal limits
  bool condition4 = true;  // intermediate systems within relaxed limits
  bool condition5 = true;  // every batch owned by one agent (AS only)
  std::vector<BatchCheck> batches;
  std::vector<std::string> details;
};

// Exact metrics: H_b with the square root, telescoped H_v, H_c, H_n; the
// envelope is taken at z_0 and z_T with p_g. Throws Disconnected when a
// transitional topology is split.
MetricReport metrics(const GridCase& grid, const Trajectory& traj, const std::vector<double>& pg,
                     const PropertyWeights& weights);

// Conditions 1, 2, 4 (per `c4`) and, in AS mode, batch ownership, plus the
// metrics above. H_p sums transitional normal-limit violations and the
// intermediate relaxed-limit violations the selected mode examines.
MetricReport validate_trajectory(const GridCase& grid, const Trajectory& traj, const std::vector<double>& pg,
                                 SwitchMode mode, dcflow::Condition4Mode c4, const PropertyWeights& weights = {},
                                 std::size_t cap = VariantSpace::kDefaultCap);

// H' = alpha_b H_b(L1) + alpha_v H_v + alpha_c H_c + alpha_p H_p + alpha_n H_n;
// infinite when Condition 1 fails.
double model_objective(const MetricReport& report, const Weights& w);

// Convenience: assumption-mode validation under `cfg` followed by
// model_objective, the quantity the OTT model minimizes.
double evaluate_objective(const GridCase& grid, const Trajectory& traj, const std::vector<double>& pg,
                          const OttConfig& cfg);

struct OttDecision {
  std::vector<Topology> z;   // t = 0..T_u
  std::vector<Topology> zb;  // t = 1..T_u at index t-1
  std::vector<int> delta;    // t = 1..T_u at index t-1
  std::vector<std::size_t> agent;  // AS: selected agent per t; empty in SS
  std::size_t T = 0;         // effective batch count
  double slack_transitional = 0.0;
  double slack_intermediate = 0.0;
  std::vector<double> pg;    // TETOP dispatch, empty otherwise
  Topology terminal;
  Trajectory trajectory;

  double slack_total() const { return slack_transitional + slack_intermediate; }
};

// Reads z_t, z^b_t, delta, u_t and slacks from an OTT/TETOP assignment and
// strips the padding (z_t = z_{t-1}).
OttDecision decode(const GridCase& grid, const milp::MilpModel& model, const std::vector<double>& x,
                   const OttConfig& cfg);

}  // namespace ott
