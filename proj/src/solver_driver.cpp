#include "ott/solver_driver.hpp"

#include <chrono>
#include <cmath>
#include <set>

#include "ott/error.hpp"

namespace ott {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// A horizon change keeps user durations where they exist and pads with 1.
OttConfig at_horizon(const OttConfig& cfg, std::size_t T_u, bool necessary_only) {
  OttConfig c = cfg;
  c.T_u = T_u;
  c.necessary_only = necessary_only;
  if (!c.durations.empty()) c.durations.resize(T_u - 1, 1.0);
  return c;
}

bool is_limit(milp::SolveStatus s) {
  return s == milp::SolveStatus::gap_limit || s == milp::SolveStatus::node_limit;
}

SolveRecord record_of(const milp::SolveOutcome& o, std::size_t T_u, bool nec, bool warm) {
  SolveRecord r;
  r.T_u = T_u;
  r.necessary_only = nec;
  r.warm_started = warm;
  r.status = o.status;
  r.objective = o.objective;
  r.nodes = o.nodes;
  r.lp_iterations = o.lp_iterations;
  r.seconds = o.wall_seconds;
  return r;
}

}  // namespace

std::size_t compute_T_lower(const GridCase& grid, const Topology& z0, const Topology& zT, SwitchMode mode) {
  grid.check_topology(z0);
  grid.check_topology(zT);
  if (z0 == zT) return 0;
  if (mode == SwitchMode::ss) return is_connected(grid, intersection_topology(z0, zT)) ? 1 : 2;
  std::set<std::size_t> agents;
  for (std::size_t e : changed_branches(z0, zT)) agents.insert(grid.agent_of(e));
  return agents.size();
}

OttResult solve_ott_direct(const GridCase& grid, const Topology& z0, const Topology& zT,
                           const std::vector<double>& pg, const OttConfig& cfg, const DriverOptions& opts,
                           const std::vector<Trajectory>& candidates) {
  const auto t0 = std::chrono::steady_clock::now();
  const milp::MilpModel model = formulations::build_ott(grid, z0, zT, pg, cfg);

  std::optional<std::vector<double>> warm;
  double warm_obj = milp::kInf;
  for (const Trajectory& c : candidates) {
    auto x = formulations::encode_trajectory(grid, model, c.topologies, pg);
    if (!x) continue;
    const double obj = model.objective_value(*x);
    if (obj < warm_obj) {
      warm_obj = obj;
      warm = std::move(x);
    }
  }

  const milp::SolveOutcome out = milp::solve_bb(model, warm, opts.bb);
  OttResult r;
  r.status = out.status;
  r.T_u = cfg.T_u;
  r.nodes = out.nodes;
  r.lp_iterations = out.lp_iterations;
  SolveRecord rec = record_of(out, cfg.T_u, cfg.necessary_only, warm.has_value());
  if (out.has_solution()) {
    r.objective = out.objective;
    r.decision = decode(grid, model, out.assignment, cfg);
    r.report = validate_trajectory(grid, r.decision.trajectory, pg, cfg.mode, dcflow::Condition4Mode::assumption,
                                   cfg.property_weights);
    rec.decoded_T = r.decision.T;
  }
  r.runs.push_back(rec);
  r.seconds = seconds_since(t0);
  return r;
}

OttResult algorithm1(const GridCase& grid, const Topology& z0, const Topology& zT, const std::vector<double>& pg,
                     const OttConfig& cfg, const DriverOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  cfg.validate(grid);
  std::vector<Trajectory> phi;
  phi.push_back(cfg.mode == SwitchMode::ss ? adhoc_syn(z0, zT) : adhoc_asy(grid, z0, zT));
  const std::size_t T_l = std::max<std::size_t>(1, compute_T_lower(grid, z0, zT, cfg.mode));

  std::vector<SolveRecord> runs;
  std::size_t nodes = 0, lp_iterations = 0;
  auto pass = [&](bool necessary_only) {
    OttResult last;
    std::optional<std::size_t> prev_T;
    std::size_t T_u = T_l;
    for (std::size_t it = 0; it < opts.max_iterations; ++it, T_u += 2) {
      OttResult r = solve_ott_direct(grid, z0, zT, pg, at_horizon(cfg, T_u, necessary_only), opts, phi);
      nodes += r.nodes;
      lp_iterations += r.lp_iterations;
      runs.insert(runs.end(), r.runs.begin(), r.runs.end());
      if (is_limit(r.status)) return r;
      if (!r.has_solution()) continue;
      phi.push_back(r.decision.trajectory);
      const bool stable = prev_T && *prev_T == r.decision.T;
      prev_T = r.decision.T;
      last = std::move(r);
      if (stable) break;
    }
    return last;
  };

  OttResult result = pass(true);
  if (!is_limit(result.status) &&
      (!result.has_solution() || result.decision.slack_total() > opts.slack_tolerance)) {
    result = pass(false);
    result.second_pass = true;
  }
  result.runs = std::move(runs);
  result.nodes = nodes;
  result.lp_iterations = lp_iterations;
  result.seconds = seconds_since(t0);
  return result;
}

OtsResult solve_ots(const GridCase& grid, const Topology& z0, std::size_t n_s, std::size_t n_s_min,
                    const DriverOptions& opts, double big_m_floor) {
  const auto t0 = std::chrono::steady_clock::now();
  const milp::MilpModel model = formulations::build_dc_ots(grid, z0, n_s, n_s_min, big_m_floor);
  milp::BbOptions bb = opts.bb;
  bb.gap = 1e-9;
  const milp::SolveOutcome out = milp::solve_bb(model, std::nullopt, bb);
  OtsResult r;
  r.status = out.status;
  r.nodes = out.nodes;
  if (out.has_solution()) {
    r.solution = formulations::decode_ots(grid, model, out.assignment);
    r.solution.pg = dcflow::balance_dispatch(grid, r.solution.pg);
    r.solution.cost = dcflow::dispatch_cost(grid, r.solution.pg);
  }
  r.seconds = seconds_since(t0);
  return r;
}

TetopResult solve_tetop_direct(const GridCase& grid, const Topology& z0, const TetopConfig& cfg,
                               const DriverOptions& opts, const std::optional<OttDecision>& warm_from) {
  const auto t0 = std::chrono::steady_clock::now();
  const milp::MilpModel model = formulations::build_tetop(grid, z0, cfg);
  std::optional<std::vector<double>> warm;
  if (warm_from && !warm_from->pg.empty())
    warm = formulations::encode_trajectory(grid, model, warm_from->trajectory.topologies, warm_from->pg);

  const milp::SolveOutcome out = milp::solve_bb(model, warm, opts.bb);
  TetopResult r;
  r.status = out.status;
  r.T_u = cfg.ott.T_u;
  r.nodes = out.nodes;
  SolveRecord rec = record_of(out, cfg.ott.T_u, cfg.ott.necessary_only, warm.has_value());
  if (out.has_solution()) {
    r.objective = out.objective;
    r.decision = decode(grid, model, out.assignment, cfg.ott);
    r.decision.pg = dcflow::balance_dispatch(grid, r.decision.pg);
    r.dispatch_cost = dcflow::dispatch_cost(grid, r.decision.pg);
    r.report = validate_trajectory(grid, r.decision.trajectory, r.decision.pg, cfg.ott.mode,
                                   dcflow::Condition4Mode::assumption, cfg.ott.property_weights);
    rec.decoded_T = r.decision.T;
  }
  r.runs.push_back(rec);
  r.seconds = seconds_since(t0);
  return r;
}

TetopResult tetop_algorithm1(const GridCase& grid, const Topology& z0, const TetopConfig& cfg,
                             const DriverOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  cfg.validate(grid);
  std::vector<SolveRecord> runs;
  std::size_t nodes = 0;
  std::optional<OttDecision> incumbent;

  auto pass = [&](bool necessary_only) {
    TetopResult last;
    std::optional<std::size_t> prev_T;
    std::size_t T_u = 1;
    for (std::size_t it = 0; it < opts.max_iterations; ++it, T_u += 2) {
      TetopConfig c = cfg;
      c.ott = at_horizon(cfg.ott, T_u, necessary_only);
      TetopResult r = solve_tetop_direct(grid, z0, c, opts, incumbent);
      nodes += r.nodes;
      runs.insert(runs.end(), r.runs.begin(), r.runs.end());
      if (is_limit(r.status)) return r;
      if (!r.has_solution()) continue;
      incumbent = r.decision;
      const bool stable = prev_T && *prev_T == r.decision.T;
      prev_T = r.decision.T;
      last = std::move(r);
      if (stable) break;
    }
    return last;
  };

  TetopResult result = pass(true);
  if (!is_limit(result.status) && !result.has_solution()) result = pass(false);
  result.runs = std::move(runs);
  result.nodes = nodes;
  result.seconds = seconds_since(t0);
  return result;
}

double relative_cost_change(double f_ots, double f_other) {
  if (f_ots == 0.0) return f_other == 0.0 ? 0.0 : milp::kInf;
  return (f_other - f_ots) / std::abs(f_ots);
}

ModelComparison run_models_123(const GridCase& grid, const Topology& z0, const TetopConfig& cfg,
                               const DriverOptions& opts) {
  ModelComparison mc;
  mc.ots = solve_ots(grid, z0, cfg.n_s, cfg.n_s_min, opts, cfg.ott.big_m_floor);
  if (!mc.ots.has_solution()) return mc;

  OttConfig c1 = cfg.ott;
  c1.n_e = 0;
  mc.model1 = algorithm1(grid, z0, mc.ots.solution.z, mc.ots.solution.pg, c1, opts);

  TetopConfig c2 = cfg;
  c2.ott.n_e = 0;
  mc.model2 = tetop_algorithm1(grid, z0, c2, opts);
  TetopConfig c3 = c2;
  c3.ott.single_switch_batches = true;
  mc.model3 = tetop_algorithm1(grid, z0, c3, opts);

  const double f1 = mc.ots.solution.cost;
  if (mc.model2.has_solution()) mc.r_f2 = relative_cost_change(f1, mc.model2.dispatch_cost);
  if (mc.model3.has_solution()) mc.r_f3 = relative_cost_change(f1, mc.model3.dispatch_cost);
  return mc;
}

}  // namespace ott
