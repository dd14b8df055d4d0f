#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ott/formulations.hpp"
#include "ott/milp/bb.hpp"
#include "ott/trajectories.hpp"

namespace ott {

struct DriverOptions {
  milp::BbOptions bb = [] {
    milp::BbOptions o;
    // The objective is dominated by alpha_c * H_c, so a 1e-6 relative gap
    // would swallow the boundedness and volatility terms entirely.
    o.gap = 1e-10;
    return o;
  }();
  std::size_t max_iterations = 10;  // horizon increments per pass
  double slack_tolerance = 1e-6;    // H_p above this triggers the second pass
};

// One model solve inside a driver run.
struct SolveRecord {
  std::size_t T_u = 0;
  bool necessary_only = false;
  bool warm_started = false;
  milp::SolveStatus status = milp::SolveStatus::infeasible;
  double objective = milp::kInf;
  std::size_t decoded_T = 0;
  std::size_t nodes = 0;
  std::size_t lp_iterations = 0;
  double seconds = 0.0;
};

struct OttResult {
  milp::SolveStatus status = milp::SolveStatus::infeasible;
  double objective = milp::kInf;
  std::size_t T_u = 0;
  OttDecision decision;
  MetricReport report;  // assumption-mode validation of the decoded trajectory
  std::vector<SolveRecord> runs;
  std::size_t nodes = 0;
  std::size_t lp_iterations = 0;
  double seconds = 0.0;
  bool second_pass = false;

  bool has_solution() const { return !decision.z.empty(); }
};

// SS: 1 when z_0 o z_T is connected, else 2. AS: number of agents owning a
// changed branch (at least 1 when anything changes, 0 when nothing does).
std::size_t compute_T_lower(const GridCase& grid, const Topology& z0, const Topology& zT, SwitchMode mode);

// Solves the OTT model at cfg.T_u. Each candidate trajectory that encodes
// into the model is a warm-start candidate; the cheapest one seeds the search.
OttResult solve_ott_direct(const GridCase& grid, const Topology& z0, const Topology& zT,
                           const std::vector<double>& pg, const OttConfig& cfg, const DriverOptions& opts = {},
                           const std::vector<Trajectory>& candidates = {});

// Progressive-horizon loop: necessary-only pass from T_u = T_l growing by 2
// until the decoded T repeats, then, if H_p > 0, a second pass without the
// necessary-only constraint. Solutions accumulate in the candidate set.
OttResult algorithm1(const GridCase& grid, const Topology& z0, const Topology& zT, const std::vector<double>& pg,
                     const OttConfig& cfg, const DriverOptions& opts = {});

struct OtsResult {
  milp::SolveStatus status = milp::SolveStatus::infeasible;
  formulations::OtsSolution solution;
  std::size_t nodes = 0;
  double seconds = 0.0;

  bool has_solution() const { return !solution.pg.empty(); }
};

OtsResult solve_ots(const GridCase& grid, const Topology& z0, std::size_t n_s, std::size_t n_s_min,
                    const DriverOptions& opts = {}, double big_m_floor = 1e4);

struct TetopResult {
  milp::SolveStatus status = milp::SolveStatus::infeasible;
  double objective = milp::kInf;
  std::size_t T_u = 0;
  OttDecision decision;   // decision.pg is balanced to dcflow tolerance
  double dispatch_cost = 0.0;
  MetricReport report;
  std::vector<SolveRecord> runs;
  std::size_t nodes = 0;
  double seconds = 0.0;

  bool has_solution() const { return !decision.z.empty(); }
};

TetopResult solve_tetop_direct(const GridCase& grid, const Topology& z0, const TetopConfig& cfg,
                               const DriverOptions& opts = {}, const std::optional<OttDecision>& warm = {});

// Same loop as algorithm1 with an empty initial candidate set; earlier
// incumbents warm-start later horizons. Starts at T_u = 1.
TetopResult tetop_algorithm1(const GridCase& grid, const Topology& z0, const TetopConfig& cfg,
                             const DriverOptions& opts = {});

struct ModelComparison {
  OtsResult ots;
  OttResult model1;    // OTT towards the OTS optimum, n_e = 0
  TetopResult model2;  // TETOP, n_e = 0
  TetopResult model3;  // TETOP with single-switch batches
  double r_f2 = 0.0;   // (f_2 - f_1) / f_1
  double r_f3 = 0.0;
};

double relative_cost_change(double f_ots, double f_other);

ModelComparison run_models_123(const GridCase& grid, const Topology& z0, const TetopConfig& cfg,
                               const DriverOptions& opts = {});

}  // namespace ott
