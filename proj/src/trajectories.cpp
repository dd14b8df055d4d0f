#include "ott/trajectories.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "ott/error.hpp"

namespace ott {

double Trajectory::duration(std::size_t t) const {
  if (durations.empty()) return 1.0;
  return durations.at(t - 1);
}

nlohmann::json trajectory_to_json(const GridCase& grid, const Trajectory& traj) {
  nlohmann::json j;
  j["topologies"] = nlohmann::json::array();
  for (const Topology& z : traj.topologies) j["topologies"].push_back(topology_to_json(z));
  j["durations"] = traj.durations;
  j["batches"] = nlohmann::json::array();
  for (std::size_t t = 1; t < traj.topologies.size(); ++t) {
    nlohmann::json b;
    b["t"] = t;
    b["closed"] = nlohmann::json::array();
    b["opened"] = nlohmann::json::array();
    for (std::size_t e : changed_branches(traj.topologies[t - 1], traj.topologies[t]))
      b[traj.topologies[t][e] ? "closed" : "opened"].push_back(grid.branch(e).id);
    j["batches"].push_back(b);
  }
  return j;
}

Trajectory trajectory_from_json(const nlohmann::json& j) {
  Trajectory traj;
  const nlohmann::json& list = j.is_array() ? j : j.at("topologies");
  for (const auto& z : list) traj.topologies.push_back(topology_from_json(z));
  if (j.is_object() && j.contains("durations")) traj.durations = j.at("durations").get<std::vector<double>>();
  if (traj.topologies.empty()) throw InvalidInput("trajectory has no topologies");
  if (!traj.durations.empty() && traj.durations.size() + 2 != traj.topologies.size())
    throw InvalidInput("trajectory durations must list d_1..d_{T-1}");
  return traj;
}

namespace {

void check_pair(const Topology& z0, const Topology& zT) {
  if (z0.size() != zT.size()) throw InvalidInput("topologies differ in length");
}

void push_distinct(Trajectory& traj, const Topology& z) {
  if (traj.topologies.empty() || traj.topologies.back() != z) traj.topologies.push_back(z);
}

}  // namespace

Trajectory adhoc_syn(const Topology& z0, const Topology& zT) {
  check_pair(z0, zT);
  Trajectory traj;
  Topology mid = z0;
  for (std::size_t e = 0; e < z0.size(); ++e)
    if (zT[e]) mid.set(e, true);
  push_distinct(traj, z0);
  push_distinct(traj, mid);
  push_distinct(traj, zT);
  return traj;
}

Trajectory adhoc_asy(const GridCase& grid, const Topology& z0, const Topology& zT) {
  check_pair(z0, zT);
  if (grid.num_agents() == 0) throw InvalidInput("asynchronous ad-hoc trajectory needs an agent partition");
  Trajectory traj;
  Topology z = z0;
  push_distinct(traj, z);
  for (int phase = 0; phase < 2; ++phase) {
    const bool closing = phase == 0;
    for (const auto& agent : grid.agents()) {
      bool touched = false;
      for (std::size_t e : agent)
        if (z0[e] != zT[e] && zT[e] == closing) {
          z.set(e, closing);
          touched = true;
        }
      if (touched) push_distinct(traj, z);
    }
  }
  if (traj.topologies.back() != zT) throw InvalidInput("changed branches outside the agent partition");
  return traj;
}

Trajectory adhoc_one(const Topology& z0, const Topology& zT, const std::optional<std::vector<std::size_t>>& order) {
  check_pair(z0, zT);
  const std::vector<std::size_t> changed = changed_branches(z0, zT);
  std::vector<std::size_t> seq;
  if (order) {
    seq = *order;
    std::vector<std::size_t> sorted = seq;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != changed) throw InvalidInput("switch order must be a permutation of the changed branches");
  } else {
    for (std::size_t e : changed)
      if (zT[e]) seq.push_back(e);
    for (std::size_t e : changed)
      if (!zT[e]) seq.push_back(e);
  }
  Trajectory traj;
  Topology z = z0;
  traj.topologies.push_back(z);
  for (std::size_t e : seq) {
    z.set(e, zT[e]);
    traj.topologies.push_back(z);
  }
  return traj;
}

PropertyMetrics property_metrics(const std::vector<std::vector<double>>& P, const std::vector<double>& w_b,
                                 const std::vector<double>& w_v, const std::vector<double>& durations) {
  PropertyMetrics m;
  if (P.size() < 2) return m;
  const std::size_t T = P.size() - 1, K = P[0].size();
  if (w_b.size() != K || w_v.size() != K) throw InvalidInput("property weight length mismatch");
  const std::vector<double>& P0 = P.front();
  const std::vector<double>& PT = P.back();
  double quad = 0.0;
  for (std::size_t t = 1; t < T; ++t) {
    const double d = durations.empty() ? 1.0 : durations.at(t - 1);
    for (std::size_t k = 0; k < K; ++k) {
      const double hi = std::max(P0[k], PT[k]), lo = std::min(P0[k], PT[k]);
      const double dp = std::max(0.0, P[t][k] - hi) + std::max(0.0, lo - P[t][k]);
      quad += d * w_b[k] * dp * dp;
      m.H_b_l1 += d * w_b[k] * dp;
    }
  }
  m.H_b = std::sqrt(quad);
  for (std::size_t t = 1; t <= T; ++t)
    for (std::size_t k = 0; k < K; ++k) m.H_v += w_v[k] * std::abs(P[t][k] - P[t - 1][k]);
  for (std::size_t k = 0; k < K; ++k) m.H_v -= w_v[k] * std::abs(P0[k] - PT[k]);
  // The telescope is nonnegative; clear rounding below zero.
  if (m.H_v < 0.0 && m.H_v > -1e-9 * (1.0 + std::abs(m.H_v))) m.H_v = 0.0;
  return m;
}

namespace {

void fill_metrics(MetricReport& r, const GridCase& grid, const Trajectory& traj, const std::vector<double>& pg,
                  const PropertyWeights& weights) {
  const std::size_t nE = grid.num_branches();
  std::vector<std::vector<double>> P;
  for (const Topology& z : traj.topologies)
    P.push_back(formulations::property_values(grid, dcflow::solve_dc_flow(grid, z, pg)));
  const PropertyMetrics pm = property_metrics(P, weights.boundedness(nE), weights.volatility(nE), traj.durations);
  r.H_b = pm.H_b;
  r.H_b_l1 = pm.H_b_l1;
  r.H_v = pm.H_v;
  r.H_c = 0.0;
  r.H_n = 0.0;
  for (std::size_t t = 1; t < traj.topologies.size(); ++t) {
    const auto changed = changed_branches(traj.topologies[t - 1], traj.topologies[t]);
    for (std::size_t e : changed) r.H_c += grid.branch(e).switch_cost;
    if (!changed.empty()) r.H_n += 1.0;
  }
}

void check_trajectory(const GridCase& grid, const Trajectory& traj, const std::vector<double>& pg) {
  if (traj.topologies.empty()) throw InvalidInput("trajectory has no topologies");
  for (const Topology& z : traj.topologies) grid.check_topology(z);
  if (pg.size() != grid.num_buses()) throw InvalidInput("dispatch must have one entry per bus");
  if (!traj.durations.empty() && traj.durations.size() + 2 != traj.topologies.size())
    throw InvalidInput("trajectory durations must list d_1..d_{T-1}");
}

}  // namespace

MetricReport metrics(const GridCase& grid, const Trajectory& traj, const std::vector<double>& pg,
                     const PropertyWeights& weights) {
  check_trajectory(grid, traj, pg);
  MetricReport r;
  fill_metrics(r, grid, traj, pg, weights);
  return r;
}

MetricReport validate_trajectory(const GridCase& grid, const Trajectory& traj, const std::vector<double>& pg,
                                 SwitchMode mode, dcflow::Condition4Mode c4, const PropertyWeights& weights,
                                 std::size_t cap) {
  check_trajectory(grid, traj, pg);
  MetricReport r;
  const std::size_t T = traj.T();
  const auto& Z = traj.topologies;
  bool transitional_ok = true;
  for (std::size_t t = 1; t <= T; ++t) {
    BatchCheck b;
    b.t = t;
    const Topology inter = intersection_topology(Z[t - 1], Z[t]);
    b.connected = is_connected(grid, inter);
    if (!b.connected) {
      r.condition1 = false;
      r.details.push_back("t=" + std::to_string(t) + ": intersection topology is disconnected");
    }
    if (t < T) {
      if (!is_connected(grid, Z[t])) {
        transitional_ok = false;
        r.condition2 = false;
        r.details.push_back("t=" + std::to_string(t) + ": transitional topology is disconnected");
      } else {
        const auto s = dcflow::solve_dc_flow(grid, Z[t], pg);
        b.transitional_violation = dcflow::check_limits(grid, Z[t], s, dcflow::LimitSet::normal).total;
        if (b.transitional_violation > dcflow::kLimitTolerance) {
          r.condition2 = false;
          r.details.push_back("t=" + std::to_string(t) + ": normal limits exceeded at transitional topology");
        }
      }
    }
    if (c4 == dcflow::Condition4Mode::assumption) {
      if (b.connected) {
        const auto s = dcflow::solve_dc_flow(grid, inter, pg);
        b.intermediate_violation = dcflow::check_limits(grid, inter, s, dcflow::LimitSet::relaxed).total;
      }
    } else {
      const VariantSpace space(Z[t - 1], Z[t], cap);
      for (std::uint64_t i = 0; i < space.count(); ++i) {
        const Topology v = space.topology(i);
        if (!is_connected(grid, v)) {
          ++b.disconnected_variants;
          continue;
        }
        const auto s = dcflow::solve_dc_flow(grid, v, pg);
        b.intermediate_violation += dcflow::check_limits(grid, v, s, dcflow::LimitSet::relaxed).total;
      }
      if (b.disconnected_variants > 0) {
        r.condition4 = false;
        r.details.push_back("t=" + std::to_string(t) + ": " + std::to_string(b.disconnected_variants) +
                            " disconnected intermediate variants");
      }
    }
    if (b.intermediate_violation > dcflow::kLimitTolerance) {
      r.condition4 = false;
      r.details.push_back("t=" + std::to_string(t) + ": relaxed limits exceeded at intermediate topology");
    }
    if (mode == SwitchMode::as) {
      std::set<std::size_t> owners;
      for (std::size_t e : changed_branches(Z[t - 1], Z[t])) owners.insert(grid.agent_of(e));
      b.single_agent = owners.size() <= 1;
      if (!b.single_agent) {
        r.condition5 = false;
        r.details.push_back("t=" + std::to_string(t) + ": batch spans several agents");
      }
    }
    r.H_p_transitional += b.transitional_violation;
    r.H_p_intermediate += b.intermediate_violation;
    r.batches.push_back(b);
  }
  r.H_p = r.H_p_transitional + r.H_p_intermediate;
  if (transitional_ok) fill_metrics(r, grid, traj, pg, weights);
  else {
    r.H_b = r.H_b_l1 = r.H_v = std::numeric_limits<double>::infinity();
    for (std::size_t t = 1; t <= T; ++t) {
      const auto changed = changed_branches(Z[t - 1], Z[t]);
      for (std::size_t e : changed) r.H_c += grid.branch(e).switch_cost;
      if (!changed.empty()) r.H_n += 1.0;
    }
  }
  return r;
}

double model_objective(const MetricReport& r, const Weights& w) {
  if (!r.condition1) return std::numeric_limits<double>::infinity();
  return w.alpha_b * r.H_b_l1 + w.alpha_v * r.H_v + w.alpha_c * r.H_c + w.alpha_p * r.H_p + w.alpha_n * r.H_n;
}

double evaluate_objective(const GridCase& grid, const Trajectory& traj, const std::vector<double>& pg,
                          const OttConfig& cfg) {
  const MetricReport r =
      validate_trajectory(grid, traj, pg, cfg.mode, dcflow::Condition4Mode::assumption, cfg.property_weights);
  if (cfg.mode == SwitchMode::as && !r.condition5) return std::numeric_limits<double>::infinity();
  return model_objective(r, cfg.weights);
}

namespace {

Topology read_topology(const std::vector<std::size_t>& g, const std::vector<double>& x) {
  Topology z(g.size(), false);
  for (std::size_t e = 0; e < g.size(); ++e) z.set(e, x[g[e]] > 0.5);
  return z;
}

double group_sum(const milp::MilpModel& m, const std::string& name, const std::vector<double>& x) {
  if (!m.has_group(name)) return 0.0;
  double s = 0.0;
  for (std::size_t v : m.group(name))
    if (v != milp::kNoVar) s += x[v];
  return s;
}

}  // namespace

OttDecision decode(const GridCase& grid, const milp::MilpModel& model, const std::vector<double>& x,
                   const OttConfig& cfg) {
  if (x.size() != model.num_variables()) throw InvalidInput("assignment does not match the model");
  OttDecision d;
  const std::size_t T_u = model.group("delta").size();
  for (std::size_t t = 0; t <= T_u; ++t) d.z.push_back(read_topology(model.group("z." + std::to_string(t)), x));
  for (std::size_t t = 1; t <= T_u; ++t) {
    const std::string s = std::to_string(t);
    d.zb.push_back(read_topology(model.group("zb." + s), x));
    d.delta.push_back(x[model.group("delta")[t - 1]] > 0.5 ? 1 : 0);
    if (model.has_group("u." + s)) {
      const auto& u = model.group("u." + s);
      std::size_t pick = 0;
      for (std::size_t k = 0; k < u.size(); ++k)
        if (x[u[k]] > 0.5) pick = k;
      d.agent.push_back(pick);
    }
    if (t < T_u) d.slack_transitional += group_sum(model, "xi." + s, x);
    d.slack_intermediate += group_sum(model, "xir." + s, x);
  }
  if (model.has_group("kind.tetop")) {
    for (std::size_t v : model.group("pg")) d.pg.push_back(x[v]);
  }
  for (const Topology& z : d.z)
    if (z.size() != grid.num_branches()) throw InvalidInput("model does not belong to this case");
  d.terminal = d.z.back();
  d.trajectory.topologies.push_back(d.z[0]);
  for (std::size_t t = 1; t <= T_u; ++t)
    if (d.z[t] != d.trajectory.topologies.back()) d.trajectory.topologies.push_back(d.z[t]);
  d.T = d.trajectory.T();
  if (!cfg.durations.empty())
    for (std::size_t t = 1; t < d.T; ++t) d.trajectory.durations.push_back(cfg.duration(t));
  return d;
}

}  // namespace ott
