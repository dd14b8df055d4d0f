#include "ott/dcflow.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ott/error.hpp"
#include "ott/linalg.hpp"

namespace ott::dcflow {

FlowState solve_dc_flow(const GridCase& grid, const Topology& z, const std::vector<double>& p_g) {
  grid.check_topology(z);
  const std::size_t n = grid.num_buses();
  if (p_g.size() != n) throw InvalidInput("generation vector length mismatch");

  std::vector<double> injection(n);
  double imbalance = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    injection[i] = p_g[i] - grid.bus(i).p_d;
    imbalance += injection[i];
  }
  if (std::abs(imbalance) > kBalanceTolerance)
    throw PowerImbalance("power imbalance: sum(p_g - p_d) = " + std::to_string(imbalance));
  if (!is_connected(grid, z)) throw Disconnected();

  FlowState state;
  state.p_g = p_g;
  state.theta.assign(n, 0.0);
  state.p_l.assign(grid.num_branches(), 0.0);
  if (n == 1) return state;

  // Reduced susceptance matrix without the reference bus.
  const std::size_t ref = grid.reference_index();
  auto reduced = [ref](std::size_t i) { return i < ref ? i : i - 1; };
  Matrix laplacian(n - 1, n - 1);
  for (std::size_t e = 0; e < grid.num_branches(); ++e) {
    if (!z[e]) continue;
    const double b = grid.branch(e).b;
    const std::size_t u = grid.from_index(e);
    const std::size_t v = grid.to_index(e);
    if (u != ref) laplacian(reduced(u), reduced(u)) += b;
    if (v != ref) laplacian(reduced(v), reduced(v)) += b;
    if (u != ref && v != ref) {
      laplacian(reduced(u), reduced(v)) -= b;
      laplacian(reduced(v), reduced(u)) -= b;
    }
  }
  auto lu = LuFactorization::factor(std::move(laplacian), kPivotThreshold);
  if (!lu) throw Disconnected("disconnected (singular reduced network matrix)");

  std::vector<double> rhs;
  rhs.reserve(n - 1);
  for (std::size_t i = 0; i < n; ++i)
    if (i != ref) rhs.push_back(injection[i]);
  lu->solve_in_place(rhs);
  for (std::size_t i = 0; i < n; ++i)
    if (i != ref) state.theta[i] = rhs[reduced(i)];

  for (std::size_t e = 0; e < grid.num_branches(); ++e) {
    if (!z[e]) continue;
    state.p_l[e] = grid.branch(e).b * state.angle_difference(grid, e);
  }
  return state;
}

ViolationReport check_limits(const GridCase& grid, const Topology& z, const FlowState& state,
                             LimitSet limits) {
  const std::size_t m = grid.num_branches();
  ViolationReport r;
  r.angle.assign(m, 0.0);
  r.flow.assign(m, 0.0);
  for (std::size_t e = 0; e < m; ++e) {
    if (!z[e]) continue;
    const Branch& br = grid.branch(e);
    const double theta_lim = limits == LimitSet::normal ? br.theta_max : br.theta_max_relaxed;
    const double flow_lim = limits == LimitSet::normal ? br.p_max : br.p_max_relaxed;
    r.angle[e] = std::max(0.0, std::abs(state.angle_difference(grid, e)) - theta_lim);
    r.flow[e] = std::max(0.0, std::abs(state.p_l[e]) - flow_lim);
    r.total += r.angle[e] + r.flow[e];
  }
  return r;
}

double balance_residual(const GridCase& grid, const FlowState& state) {
  std::vector<double> residual(grid.num_buses());
  for (std::size_t i = 0; i < grid.num_buses(); ++i)
    residual[i] = grid.bus(i).p_d - state.p_g[i];
  for (std::size_t e = 0; e < grid.num_branches(); ++e) {
    residual[grid.from_index(e)] += state.p_l[e];
    residual[grid.to_index(e)] -= state.p_l[e];
  }
  double worst = 0.0;
  for (double r : residual) worst = std::max(worst, std::abs(r));
  return worst;
}

bool condition2_feasible(const GridCase& grid, const Topology& z, const std::vector<double>& p_g) {
  if (!is_connected(grid, z)) return false;
  try {
    const FlowState s = solve_dc_flow(grid, z, p_g);
    return check_limits(grid, z, s, LimitSet::normal).clean();
  } catch (const Disconnected&) {
    return false;
  }
}

bool relaxed_feasible(const GridCase& grid, const Topology& z, const std::vector<double>& p_g) {
  if (!is_connected(grid, z)) return false;
  try {
    const FlowState s = solve_dc_flow(grid, z, p_g);
    return check_limits(grid, z, s, LimitSet::relaxed).clean();
  } catch (const Disconnected&) {
    return false;
  }
}

bool condition4_feasible(const GridCase& grid, const Topology& prev, const Topology& next,
                         const std::vector<double>& p_g, Condition4Mode mode, std::size_t cap) {
  if (mode == Condition4Mode::assumption) {
    if (prev == next) return true;
    return relaxed_feasible(grid, intersection_topology(prev, next), p_g);
  }
  const VariantSpace space(prev, next, cap);
  for (std::uint64_t i = 0; i < space.count(); ++i)
    if (!relaxed_feasible(grid, space.topology(i), p_g)) return false;
  return true;
}

double dispatch_cost(const GridCase& grid, const std::vector<double>& p_g) {
  if (p_g.size() != grid.num_buses()) throw InvalidInput("generation vector length mismatch");
  double cost = 0.0;
  for (std::size_t i = 0; i < p_g.size(); ++i) {
    const Bus& b = grid.bus(i);
    cost += b.cost_linear * p_g[i] + b.cost_quadratic * p_g[i] * p_g[i];
  }
  return cost;
}

std::vector<double> balance_dispatch(const GridCase& grid, std::vector<double> p_g, double slack) {
  const std::size_t n = grid.num_buses();
  if (p_g.size() != n) throw InvalidInput("generation vector length mismatch");
  for (std::size_t i = 0; i < n; ++i)
    p_g[i] = std::clamp(p_g[i], grid.bus(i).p_g_min, grid.bus(i).p_g_max);
  double residual = 0.0;  // generation minus load
  for (std::size_t i = 0; i < n; ++i) residual += p_g[i] - grid.bus(i).p_d;
  if (std::abs(residual) > slack)
    throw PowerImbalance("dispatch imbalance " + std::to_string(residual) + " exceeds clean-up slack");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto headroom = [&](std::size_t i) {
    return residual > 0.0 ? p_g[i] - grid.bus(i).p_g_min : grid.bus(i).p_g_max - p_g[i];
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return headroom(a) > headroom(b); });
  for (std::size_t i : order) {
    if (residual == 0.0) break;
    const double room = headroom(i);
    const double step = std::min(room, std::abs(residual));
    if (residual > 0.0) {
      p_g[i] -= step;
      residual -= step;
    } else {
      p_g[i] += step;
      residual += step;
    }
  }
  // Exact cancellation against the ordered load sum.
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += p_g[i] - grid.bus(i).p_d;
  if (std::abs(sum) > kBalanceTolerance)
    throw PowerImbalance("cannot rebalance dispatch within generator bounds");
  return p_g;
}

}  // namespace ott::dcflow
