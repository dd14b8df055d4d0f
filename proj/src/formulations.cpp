#include "ott/formulations.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ott/error.hpp"
#include "ott/linalg.hpp"

namespace ott {

using milp::kInf;
using milp::kNoVar;
using milp::Sense;
using milp::Term;

namespace {

std::vector<double> expand(const std::vector<double>& flow, const std::vector<double>& angle, std::size_t n,
                           double flow_default, double angle_default) {
  std::vector<double> w(2 * n);
  for (std::size_t e = 0; e < n; ++e) {
    w[e] = flow.empty() ? flow_default : flow[e];
    w[n + e] = angle.empty() ? angle_default : angle[e];
  }
  return w;
}

void check_weight_vector(const std::vector<double>& w, std::size_t n, const char* what) {
  if (!w.empty() && w.size() != n)
    throw InvalidInput(std::string(what) + " must have one entry per branch");
  for (double v : w)
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidInput(std::string(what) + " entries must be finite and >= 0");
}

}  // namespace

std::vector<double> PropertyWeights::boundedness(std::size_t n) const {
  return expand(w_b_flow, w_b_angle, n, 1.0, 0.0);
}

std::vector<double> PropertyWeights::volatility(std::size_t n) const {
  return expand(w_v_flow, w_v_angle, n, 1.0, 0.0);
}

void OttConfig::validate(const GridCase& grid) const {
  const Weights& w = weights;
  for (double a : {w.alpha_b, w.alpha_v, w.alpha_c, w.alpha_p, w.alpha_n})
    if (!(a >= 0.0) || !std::isfinite(a)) throw InvalidInput("weights must be finite and nonnegative");
  if (w.alpha_p < 1e3 * w.alpha_c) throw InvalidInput("weight ordering requires alpha_p >= 1e3 * alpha_c");
  if (w.alpha_c < 1e3 * std::max(w.alpha_b, w.alpha_v))
    throw InvalidInput("weight ordering requires alpha_c >= 1e3 * max(alpha_b, alpha_v)");
  if (std::min(w.alpha_b, w.alpha_v) < 1e3 * w.alpha_n)
    throw InvalidInput("weight ordering requires min(alpha_b, alpha_v) >= 1e3 * alpha_n");
  if (T_u < 1) throw InvalidInput("T_u must be at least 1");
  if (!durations.empty() && durations.size() != T_u - 1)
    throw InvalidInput("durations must list d_1..d_{T_u-1}");
  for (double d : durations)
    if (!(d > 0.0) || !std::isfinite(d)) throw InvalidInput("durations must be positive");
  if (!(big_m_floor > 0.0)) throw InvalidInput("big-M floor must be positive");
  const std::size_t n = grid.num_branches();
  check_weight_vector(property_weights.w_b_flow, n, "w_b flow weights");
  check_weight_vector(property_weights.w_v_flow, n, "w_v flow weights");
  check_weight_vector(property_weights.w_b_angle, n, "w_b angle weights");
  check_weight_vector(property_weights.w_v_angle, n, "w_v angle weights");
  if (mode == SwitchMode::as && grid.num_agents() == 0)
    throw InvalidInput("AS mode needs an agent partition in the case");
}

double OttConfig::duration(std::size_t t) const {
  if (durations.empty()) return 1.0;
  return durations.at(t - 1);
}

void TetopConfig::validate(const GridCase& grid) const {
  ott.validate(grid);
  if (!(beta >= 1e3 * ott.weights.alpha_c) || !std::isfinite(beta))
    throw InvalidInput("beta must be finite and >= 1e3 * alpha_c");
}

namespace formulations {

namespace {

Expr var_expr(std::size_t v, double c = 1.0) { return Expr{{Term{v, c}}, 0.0}; }

Expr constant_expr(double c) { return Expr{{}, c}; }

void accumulate(Expr& into, const Expr& e, double scale) {
  for (const Term& t : e.terms) into.terms.push_back(Term{t.var, scale * t.coef});
  into.constant += scale * e.constant;
}

Expr difference(const Expr& a, const Expr& b) {
  Expr d = a;
  accumulate(d, b, -1.0);
  return d;
}

// a'x + constant  (sense)  rhs
void add_expr_row(MilpModel& m, const Expr& e, Sense s, double rhs) {
  m.add_row(e.terms, s, rhs - e.constant);
}

bool is_fixed(const MilpModel& m, std::size_t v, double value) {
  const auto& x = m.variable(v);
  return x.lower == value && x.upper == value;
}

std::string idx(const std::string& base, std::size_t t) { return base + "." + std::to_string(t); }

double total_positive_injection(const GridCase& grid, const std::vector<double>* pg) {
  double s = 0.0;
  for (std::size_t i = 0; i < grid.num_buses(); ++i) {
    const double g = pg ? (*pg)[i] : grid.bus(i).p_g_max;
    s += std::max(0.0, g - grid.bus(i).p_d);
  }
  return s;
}

// Tangent points of the quadratic cost epigraph; shared by builder and encoder.
constexpr int kTangentCuts = 16;

std::vector<double> tangent_points(const Bus& b) {
  std::vector<double> pts;
  for (int j = 0; j < kTangentCuts; ++j)
    pts.push_back(b.p_g_min + (b.p_g_max - b.p_g_min) * j / (kTangentCuts - 1));
  return pts;
}

double epigraph_value(const Bus& b, double p) {
  double best = -kInf;
  for (double q : tangent_points(b)) best = std::max(best, b.cost_quadratic * (2.0 * q * p - q * q));
  return best;
}

// Dispatch variables with linear cost scale*c1 and, for quadratic costs, an
// epigraph variable phi >= c2 (2 q p - q^2) cut at kTangentCuts points.
VarGroup add_dispatch(MilpModel& m, const GridCase& grid, double scale, VarGroup& cost_vars) {
  VarGroup pg(grid.num_buses());
  cost_vars.assign(grid.num_buses(), kNoVar);
  for (std::size_t i = 0; i < grid.num_buses(); ++i) {
    const Bus& b = grid.bus(i);
    pg[i] = m.add_continuous("pg." + std::to_string(b.id), b.p_g_min, b.p_g_max, scale * b.cost_linear);
    if (b.cost_quadratic == 0.0) continue;
    if (b.cost_quadratic < 0.0) throw InvalidInput("quadratic cost coefficients must be convex (>= 0)");
    // The cut envelope undershoots c2 p^2 >= 0 by at most c2 h^2 / 4 for spacing h.
    const double h = (b.p_g_max - b.p_g_min) / (kTangentCuts - 1);
    const double lo = -b.cost_quadratic * h * h - 1.0;
    const std::size_t phi = m.add_continuous("pgcost." + std::to_string(b.id), lo, kInf, scale);
    cost_vars[i] = phi;
    for (double q : tangent_points(b))
      m.add_row({Term{phi, 1.0}, Term{pg[i], -2.0 * b.cost_quadratic * q}}, Sense::ge,
                -b.cost_quadratic * q * q);
  }
  return pg;
}

// Per-branch terminal distance |z_e - z0_e| as a linear expression.
Expr distance_expr(std::size_t z_var, bool z0_on) {
  return z0_on ? Expr{{Term{z_var, -1.0}}, 1.0} : var_expr(z_var);
}

VarGroup topology_vars(MilpModel& m, const GridCase& grid, const std::string& name) {
  VarGroup z(grid.num_branches());
  for (std::size_t e = 0; e < grid.num_branches(); ++e) {
    z[e] = m.add_binary(name + "." + std::to_string(grid.branch(e).id));
    if (!grid.branch(e).switchable) m.fix(z[e], 1.0);
  }
  return z;
}

VarGroup fixed_topology_vars(MilpModel& m, const GridCase& grid, const Topology& z, const std::string& name) {
  VarGroup v(grid.num_branches());
  for (std::size_t e = 0; e < grid.num_branches(); ++e) {
    v[e] = m.add_binary(name + "." + std::to_string(grid.branch(e).id));
    m.fix(v[e], z[e] ? 1.0 : 0.0);
  }
  return v;
}

VarGroup product_vars(MilpModel& m, const GridCase& grid, const VarGroup& a, const VarGroup& b,
                      const std::string& name) {
  VarGroup zb(grid.num_branches());
  for (std::size_t e = 0; e < grid.num_branches(); ++e) {
    zb[e] = m.add_binary(name + "." + std::to_string(grid.branch(e).id));
    const auto& va = m.variable(a[e]);
    const auto& vb = m.variable(b[e]);
    if (va.lower == va.upper && vb.lower == vb.upper) m.fix(zb[e], va.lower * vb.lower);
    else if (va.upper == 0.0 || vb.upper == 0.0) m.fix(zb[e], 0.0);
  }
  return zb;
}

std::vector<Expr> properties_of(const GridCase& grid, const FlowVars& f) {
  std::vector<Expr> p(2 * grid.num_branches());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = property_expr(grid, f.theta, f.p_l, k);
  return p;
}

std::vector<Expr> constant_properties(const std::vector<double>& v) {
  std::vector<Expr> p;
  p.reserve(v.size());
  for (double c : v) p.push_back(constant_expr(c));
  return p;
}

void tag_flow(MilpModel& m, const FlowVars& f, const std::string& theta, const std::string& pl,
              const std::string& xi, std::size_t t) {
  m.tag(idx(theta, t), f.theta);
  m.tag(idx(pl, t), f.p_l);
  if (!f.slack.empty()) m.tag(idx(xi, t), f.slack);
}

void tag_boundedness(MilpModel& m, const BoundednessVars& b, std::size_t t) {
  m.tag(idx("rho0p", t), b.rho0_plus);
  m.tag(idx("rho0m", t), b.rho0_minus);
  m.tag(idx("rhoTp", t), b.rhoT_plus);
  m.tag(idx("rhoTm", t), b.rhoT_minus);
}

}  // namespace

BigM big_m(const GridCase& grid, double floor, const std::vector<double>* fixed_pg) {
  const double nV = static_cast<double>(grid.num_buses());
  BigM M;
  M.delta = static_cast<double>(grid.num_branches());
  M.conn_flow = nV;
  // Unit-conductance potentials of the commodity flow differ by at most
  // (|V|-1)^2 across any pair of buses; twice that plus |V| leaves headroom.
  M.conn_angle = 2.0 * (nV - 1.0) * (nV - 1.0) + nV;

  double b_min = kInf, b_max = 0.0, theta_max = 0.0;
  for (const Branch& br : grid.branches()) {
    b_min = std::min(b_min, br.b);
    b_max = std::max(b_max, br.b);
    theta_max = std::max({theta_max, br.theta_max, br.theta_max_relaxed});
  }
  if (grid.num_branches() == 0) b_min = b_max = 1.0;
  const double p_tot = total_positive_injection(grid, fixed_pg);
  M.flow_span = p_tot + 1.0;
  // Any two buses are joined by an on-path of at most |V|-1 branches, each
  // carrying at most the total injection.
  M.angle_span = (nV - 1.0) * M.flow_span / b_min + 1.0;
  const double nominal = theta_max * (1.0 + static_cast<double>(network_diameter(grid))) * b_max;
  M.angle = std::max({floor, M.angle_span + theta_max});
  M.dc = std::max({floor, nominal, b_max * M.angle_span + 1.0});
  return M;
}

Expr property_expr(const GridCase& grid, const VarGroup& theta, const VarGroup& p_l, std::size_t k) {
  const std::size_t n = grid.num_branches();
  if (k < n) return var_expr(p_l[k]);
  const std::size_t e = k - n;
  return Expr{{Term{theta[grid.from_index(e)], 1.0}, Term{theta[grid.to_index(e)], -1.0}}, 0.0};
}

std::vector<double> property_values(const GridCase& grid, const dcflow::FlowState& s) {
  const std::size_t n = grid.num_branches();
  std::vector<double> v(2 * n);
  for (std::size_t e = 0; e < n; ++e) {
    v[e] = s.p_l[e];
    v[n + e] = s.angle_difference(grid, e);
  }
  return v;
}

void add_product_linearization(MilpModel& m, const VarGroup& z_t, const VarGroup& z_prev, const VarGroup& zb) {
  for (std::size_t e = 0; e < zb.size(); ++e) {
    if (zb[e] == kNoVar) continue;
    m.add_row({Term{zb[e], 1.0}, Term{z_t[e], -1.0}}, Sense::le, 0.0);
    m.add_row({Term{zb[e], 1.0}, Term{z_prev[e], -1.0}}, Sense::le, 0.0);
    m.add_row({Term{zb[e], 1.0}, Term{z_t[e], -1.0}, Term{z_prev[e], -1.0}}, Sense::ge, -1.0);
  }
}

std::vector<Expr> abs_expansion(const VarGroup& z_t, const VarGroup& z_prev, const VarGroup& zb) {
  std::vector<Expr> out(zb.size());
  for (std::size_t e = 0; e < zb.size(); ++e)
    out[e] = Expr{{Term{z_t[e], 1.0}, Term{z_prev[e], 1.0}, Term{zb[e], -2.0}}, 0.0};
  return out;
}

void add_delta_linking(MilpModel& m, const std::vector<std::vector<Expr>>& abs_by_t, const VarGroup& delta,
                       double M) {
  for (std::size_t t = 0; t < delta.size(); ++t) {
    Expr sum;
    for (const Expr& a : abs_by_t[t]) accumulate(sum, a, 1.0);
    Expr upper = sum, lower = sum;
    accumulate(upper, var_expr(delta[t]), -M);
    accumulate(lower, var_expr(delta[t]), -1.0);
    add_expr_row(m, upper, Sense::le, 0.0);
    add_expr_row(m, lower, Sense::ge, 0.0);
  }
}

void add_sameness_exclusion(MilpModel& m, const VarGroup& delta) {
  if (delta.size() == 2) {
    m.add_row({Term{delta[1], 1.0}, Term{delta[0], -1.0}}, Sense::le, 0.0);
    return;
  }
  for (std::size_t t = 0; t + 2 < delta.size(); ++t) {
    const std::size_t a = delta[t], b = delta[t + 1], c = delta[t + 2];
    m.add_row({Term{a, 1.0}, Term{b, 1.0}, Term{c, -1.0}}, Sense::ge, 0.0);    // no (0,0,1)
    m.add_row({Term{a, 1.0}, Term{b, -1.0}, Term{c, 1.0}}, Sense::ge, 0.0);    // no (0,1,0)
    m.add_row({Term{a, 1.0}, Term{b, -1.0}, Term{c, -1.0}}, Sense::ge, -1.0);  // no (0,1,1)
    m.add_row({Term{a, -1.0}, Term{b, 1.0}, Term{c, -1.0}}, Sense::ge, -1.0);  // no (1,0,1)
  }
}

ConnectednessVars add_connectedness(MilpModel& m, const GridCase& grid, const VarGroup& gate, const BigM& M,
                                    const std::string& tag) {
  const std::size_t nV = grid.num_buses(), nE = grid.num_branches();
  const double phi_bound = (nV - 1.0) * (nV - 1.0) + 1.0;
  ConnectednessVars cv;
  cv.phi.resize(nV);
  cv.rho.resize(nE);
  for (std::size_t i = 0; i < nV; ++i) {
    cv.phi[i] = m.add_continuous(tag + ".phi." + std::to_string(i), -phi_bound, phi_bound);
    if (i == grid.reference_index()) m.fix(cv.phi[i], 0.0);
  }
  for (std::size_t e = 0; e < nE; ++e) {
    cv.rho[e] = m.add_continuous(tag + ".rho." + std::to_string(e), -M.conn_flow, M.conn_flow);
    const std::size_t g = gate[e], r = cv.rho[e];
    const std::size_t u = cv.phi[grid.from_index(e)], v = cv.phi[grid.to_index(e)];
    if (is_fixed(m, g, 0.0)) {
      m.fix(r, 0.0);
    } else if (is_fixed(m, g, 1.0)) {
      m.add_row({Term{u, 1.0}, Term{v, -1.0}, Term{r, -1.0}}, Sense::eq, 0.0);
    } else {
      m.add_row({Term{r, 1.0}, Term{g, -M.conn_flow}}, Sense::le, 0.0);
      m.add_row({Term{r, 1.0}, Term{g, M.conn_flow}}, Sense::ge, 0.0);
      m.add_row({Term{u, 1.0}, Term{v, -1.0}, Term{r, -1.0}, Term{g, M.conn_angle}}, Sense::le, M.conn_angle);
      m.add_row({Term{u, 1.0}, Term{v, -1.0}, Term{r, -1.0}, Term{g, -M.conn_angle}}, Sense::ge, -M.conn_angle);
    }
  }
  // The reference row is implied by the others since sum(c) = 0.
  const std::vector<double> c = uniquely_balanced_vector(grid);
  std::vector<std::vector<Term>> rows(nV);
  for (std::size_t e = 0; e < nE; ++e) {
    rows[grid.from_index(e)].push_back(Term{cv.rho[e], 1.0});
    rows[grid.to_index(e)].push_back(Term{cv.rho[e], -1.0});
  }
  for (std::size_t i = 0; i < nV; ++i)
    if (i != grid.reference_index()) m.add_row(rows[i], Sense::eq, c[i]);
  return cv;
}

FlowVars add_feasible_region(MilpModel& m, const GridCase& grid, const VarGroup& gate, dcflow::LimitSet limits,
                             const Injection& inj, bool with_slack, const BigM& M, const std::string& tag) {
  if ((inj.fixed_pg == nullptr) == (inj.pg == nullptr))
    throw InvalidInput("feasible region needs exactly one of fixed or variable dispatch");
  const std::size_t nV = grid.num_buses(), nE = grid.num_branches();
  const bool relaxed = limits == dcflow::LimitSet::relaxed;
  const double A = M.angle_span, F = M.flow_span;
  FlowVars f;
  f.theta.resize(nV);
  f.p_l.resize(nE);
  for (std::size_t i = 0; i < nV; ++i) {
    f.theta[i] = m.add_continuous(tag + ".theta." + std::to_string(i), -A, A);
    if (i == grid.reference_index()) m.fix(f.theta[i], 0.0);
  }
  for (std::size_t e = 0; e < nE; ++e) f.p_l[e] = m.add_continuous(tag + ".p." + std::to_string(e), -F, F);
  if (with_slack) {
    f.slack.resize(2 * nE);
    for (std::size_t e = 0; e < nE; ++e) {
      f.slack[e] = m.add_continuous(tag + ".xa." + std::to_string(e), 0.0, A);
      f.slack[nE + e] = m.add_continuous(tag + ".xf." + std::to_string(e), 0.0, F);
    }
  }

  for (std::size_t e = 0; e < nE; ++e) {
    const Branch& br = grid.branch(e);
    const double th = relaxed ? br.theta_max_relaxed : br.theta_max;
    const double pm = relaxed ? br.p_max_relaxed : br.p_max;
    const std::size_t g = gate[e], p = f.p_l[e];
    const std::size_t u = f.theta[grid.from_index(e)], v = f.theta[grid.to_index(e)];
    const std::size_t xa = with_slack ? f.slack[e] : kNoVar;
    const std::size_t xf = with_slack ? f.slack[nE + e] : kNoVar;

    if (is_fixed(m, g, 0.0)) {
      m.fix(p, 0.0);
      if (with_slack) {
        m.fix(xa, 0.0);
        m.fix(xf, 0.0);
      }
      continue;
    }
    const bool on = is_fixed(m, g, 1.0);
    // Ohm's law b (theta_u - theta_v) = p, released when the branch is off.
    if (on) {
      m.add_row({Term{p, 1.0}, Term{u, -br.b}, Term{v, br.b}}, Sense::eq, 0.0);
    } else {
      m.add_row({Term{p, 1.0}, Term{u, -br.b}, Term{v, br.b}, Term{g, M.dc}}, Sense::le, M.dc);
      m.add_row({Term{p, 1.0}, Term{u, -br.b}, Term{v, br.b}, Term{g, -M.dc}}, Sense::ge, -M.dc);
      m.add_row({Term{p, 1.0}, Term{g, -F}}, Sense::le, 0.0);
      m.add_row({Term{p, 1.0}, Term{g, F}}, Sense::ge, 0.0);
    }
    // Angle-difference limit, released when off.
    std::vector<Term> hi{Term{u, 1.0}, Term{v, -1.0}};
    std::vector<Term> lo{Term{u, 1.0}, Term{v, -1.0}};
    double hi_rhs = th, lo_rhs = -th;
    if (with_slack) {
      hi.push_back(Term{xa, -1.0});
      lo.push_back(Term{xa, 1.0});
    }
    if (!on) {
      hi.push_back(Term{g, M.angle});
      lo.push_back(Term{g, -M.angle});
      hi_rhs += M.angle;
      lo_rhs -= M.angle;
    }
    m.add_row(hi, Sense::le, hi_rhs);
    m.add_row(lo, Sense::ge, lo_rhs);
    // Flow limit; off branches carry no flow so no release is needed.
    if (with_slack) {
      m.add_row({Term{p, 1.0}, Term{xf, -1.0}}, Sense::le, pm);
      m.add_row({Term{p, 1.0}, Term{xf, 1.0}}, Sense::ge, -pm);
    } else {
      const auto& pv = m.variable(p);
      m.set_bounds(p, std::max(pv.lower, -pm), std::min(pv.upper, pm));
    }
    // Slacks only exist on switched-on branches.
    if (with_slack && !on) {
      m.add_row({Term{xa, 1.0}, Term{g, -A}}, Sense::le, 0.0);
      m.add_row({Term{xf, 1.0}, Term{g, -F}}, Sense::le, 0.0);
    }
  }

  // Nodal balance E p_l = p_g - p_d. With frozen dispatch the reference row is
  // implied by the others.
  std::vector<std::vector<Term>> rows(nV);
  for (std::size_t e = 0; e < nE; ++e) {
    rows[grid.from_index(e)].push_back(Term{f.p_l[e], 1.0});
    rows[grid.to_index(e)].push_back(Term{f.p_l[e], -1.0});
  }
  for (std::size_t i = 0; i < nV; ++i) {
    if (inj.fixed_pg) {
      if (i == grid.reference_index()) continue;
      m.add_row(rows[i], Sense::eq, (*inj.fixed_pg)[i] - grid.bus(i).p_d);
    } else {
      rows[i].push_back(Term{(*inj.pg)[i], -1.0});
      m.add_row(rows[i], Sense::eq, -grid.bus(i).p_d);
    }
  }
  return f;
}

BoundednessVars add_boundedness_auxiliaries(MilpModel& m, const std::vector<Expr>& props,
                                            const std::vector<double>& w_b, const EnvelopeRef& env, double scale,
                                            BoundednessVariant variant, const std::string& tag) {
  const std::size_t K = props.size();
  BoundednessVars b;
  b.rho0_plus.assign(K, kNoVar);
  b.rho0_minus.assign(K, kNoVar);
  b.rhoT_plus.assign(K, kNoVar);
  b.rhoT_minus.assign(K, kNoVar);
  auto bound_expr = [](const std::vector<double>* value, const VarGroup* var, std::size_t k) {
    return var ? var_expr((*var)[k]) : constant_expr((*value)[k]);
  };
  for (std::size_t k = 0; k < K; ++k) {
    if (w_b[k] <= 0.0) continue;
    const std::string s = tag + "." + std::to_string(k);
    const double c = scale * w_b[k];
    const bool l1 = variant == BoundednessVariant::l1;
    b.rho0_plus[k] = m.add_continuous("r0p." + s, 0.0, kInf, l1 ? c : 0.0);
    b.rho0_minus[k] = m.add_continuous("r0m." + s, 0.0, kInf);
    b.rhoT_plus[k] = m.add_continuous("rTp." + s, 0.0, kInf, l1 ? c : 0.0);
    b.rhoT_minus[k] = m.add_continuous("rTm." + s, 0.0, kInf);
    if (!l1) {
      m.add_quadratic_objective(b.rho0_plus[k], b.rho0_plus[k], c);
      m.add_quadratic_objective(b.rhoT_plus[k], b.rhoT_plus[k], c);
      m.add_quadratic_objective(b.rho0_plus[k], b.rhoT_plus[k], 2.0 * c);
    }
    Expr upper = difference(props[k], bound_expr(env.pmax_value, env.pmax_var, k));
    accumulate(upper, var_expr(b.rho0_plus[k]), -1.0);
    accumulate(upper, var_expr(b.rho0_minus[k]), 1.0);
    add_expr_row(m, upper, Sense::eq, 0.0);
    Expr lower = difference(bound_expr(env.pmin_value, env.pmin_var, k), props[k]);
    accumulate(lower, var_expr(b.rhoT_plus[k]), -1.0);
    accumulate(lower, var_expr(b.rhoT_minus[k]), 1.0);
    add_expr_row(m, lower, Sense::eq, 0.0);
  }
  return b;
}

VarGroup add_volatility_terms(MilpModel& m, const std::vector<Expr>& now, const std::vector<Expr>& before,
                              const std::vector<double>& w_v, double scale, const std::string& tag) {
  VarGroup a(now.size(), kNoVar);
  for (std::size_t k = 0; k < now.size(); ++k) {
    if (w_v[k] <= 0.0) continue;
    a[k] = m.add_continuous("vol." + tag + "." + std::to_string(k), 0.0, kInf, scale * w_v[k]);
    const Expr d = difference(now[k], before[k]);
    Expr up = var_expr(a[k]), dn = var_expr(a[k]);
    accumulate(up, d, -1.0);
    accumulate(dn, d, 1.0);
    add_expr_row(m, up, Sense::ge, 0.0);
    add_expr_row(m, dn, Sense::ge, 0.0);
  }
  return a;
}

VarGroup add_as_mode(MilpModel& m, const GridCase& grid, const std::vector<Expr>& abs_t, const std::string& tag) {
  const std::size_t na = grid.num_agents();
  if (na == 0) throw InvalidInput("AS mode needs an agent partition");
  const double M = static_cast<double>(grid.switchable_branches().size());
  VarGroup u(na);
  std::vector<Term> one;
  for (std::size_t k = 0; k < na; ++k) {
    u[k] = m.add_binary(tag + "." + std::to_string(k));
    one.push_back(Term{u[k], 1.0});
  }
  m.add_row(one, Sense::eq, 1.0);
  for (std::size_t k = 0; k < na; ++k) {
    Expr outside;
    for (std::size_t e = 0; e < abs_t.size(); ++e) {
      const std::size_t owner = grid.agent_of(e);
      if (owner != GridCase::npos && owner != k) accumulate(outside, abs_t[e], 1.0);
    }
    Expr hi = outside, lo = outside;
    accumulate(hi, var_expr(u[k]), M);
    accumulate(lo, var_expr(u[k]), -M);
    add_expr_row(m, hi, Sense::le, M);
    add_expr_row(m, lo, Sense::ge, -M);
  }
  return u;
}

void add_switch_budget(MilpModel& m, const std::vector<std::vector<Expr>>& abs_by_t, const Expr& limit) {
  Expr sum;
  for (const auto& abs_t : abs_by_t)
    for (const Expr& a : abs_t) accumulate(sum, a, 1.0);
  accumulate(sum, limit, -1.0);
  add_expr_row(m, sum, Sense::le, 0.0);
}

void add_necessary_only(MilpModel& m, const GridCase& grid, const std::vector<std::vector<Expr>>& abs_by_t,
                        const std::vector<Expr>& required) {
  for (std::size_t e : grid.switchable_branches()) {
    Expr sum;
    for (const auto& abs_t : abs_by_t) accumulate(sum, abs_t[e], 1.0);
    accumulate(sum, required[e], -1.0);
    add_expr_row(m, sum, Sense::eq, 0.0);
  }
}

// --- complete models -------------------------------------------------------

MilpModel build_dc_ots(const GridCase& grid, const Topology& z0, std::size_t n_s, std::size_t n_s_min,
                       double big_m_floor) {
  grid.check_topology(z0);
  MilpModel m;
  const BigM M = big_m(grid, big_m_floor, nullptr);
  VarGroup cost;
  const VarGroup pg = add_dispatch(m, grid, 1.0, cost);
  const VarGroup z = topology_vars(m, grid, "z");

  Expr dist;
  for (std::size_t e = 0; e < grid.num_branches(); ++e) accumulate(dist, distance_expr(z[e], z0[e]), 1.0);
  if (n_s < grid.num_branches()) add_expr_row(m, dist, Sense::le, static_cast<double>(n_s));
  if (n_s_min > 0) {
    std::vector<Term> on;
    for (std::size_t v : z) on.push_back(Term{v, 1.0});
    m.add_row(on, Sense::ge, static_cast<double>(n_s_min));
  }
  const ConnectednessVars cv = add_connectedness(m, grid, z, M, "conn");
  Injection inj;
  inj.pg = &pg;
  const FlowVars f = add_feasible_region(m, grid, z, dcflow::LimitSet::normal, inj, false, M, "ots");

  m.tag("kind.ots", {});
  m.tag("z", z);
  m.tag("pg", pg);
  m.tag("pgcost", cost);
  m.tag("theta", f.theta);
  m.tag("pl", f.p_l);
  m.tag("conn_phi", cv.phi);
  m.tag("conn_rho", cv.rho);
  m.seal();
  return m;
}

namespace {

struct TransitionSkeleton {
  std::vector<VarGroup> z;   // t = 0..T_u
  std::vector<VarGroup> zb;  // index t holds z^b_t, t = 1..T_u (slot 0 unused)
  std::vector<std::vector<Expr>> abs_by_t;  // t = 1..T_u at index t-1
  VarGroup delta;
};

// z_t, z^b_t, delta and the topology-sequence constraints shared by OTT and TETOP.
TransitionSkeleton add_transition_skeleton(MilpModel& m, const GridCase& grid, const OttConfig& cfg,
                                           std::vector<VarGroup> z, const BigM& M) {
  const std::size_t T = cfg.T_u, nE = grid.num_branches();
  TransitionSkeleton s;
  s.z = std::move(z);
  s.zb.resize(T + 1);
  for (std::size_t t = 1; t <= T; ++t) {
    s.zb[t] = product_vars(m, grid, s.z[t], s.z[t - 1], idx("zb", t));
    add_product_linearization(m, s.z[t], s.z[t - 1], s.zb[t]);
    s.abs_by_t.push_back(abs_expansion(s.z[t], s.z[t - 1], s.zb[t]));
  }
  for (std::size_t t = 1; t <= T; ++t) s.delta.push_back(m.add_binary(idx("delta", t), cfg.weights.alpha_n));
  add_delta_linking(m, s.abs_by_t, s.delta, M.delta);
  if (T >= 2) add_sameness_exclusion(m, s.delta);

  // H_c = sum_t w_c'|z_t - z_{t-1}|.
  for (std::size_t t = 1; t <= T; ++t)
    for (std::size_t e = 0; e < nE; ++e) {
      const double c = cfg.weights.alpha_c * grid.branch(e).switch_cost;
      if (c == 0.0) continue;
      for (const Term& term : s.abs_by_t[t - 1][e].terms) m.add_objective(term.var, c * term.coef);
    }

  if (cfg.mode == SwitchMode::as)
    for (std::size_t t = 1; t <= T; ++t) m.tag(idx("u", t), add_as_mode(m, grid, s.abs_by_t[t - 1], idx("u", t)));
  if (cfg.single_switch_batches)
    for (std::size_t t = 1; t <= T; ++t) {
      Expr sum;
      for (const Expr& a : s.abs_by_t[t - 1]) accumulate(sum, a, 1.0);
      accumulate(sum, var_expr(s.delta[t - 1]), -1.0);
      add_expr_row(m, sum, Sense::eq, 0.0);
    }
  for (std::size_t t = 1; t <= T; ++t) {
    const ConnectednessVars cv = add_connectedness(m, grid, s.zb[t], M, idx("conn", t));
    m.tag(idx("conn_phi", t), cv.phi);
    m.tag(idx("conn_rho", t), cv.rho);
  }
  for (std::size_t t = 0; t <= T; ++t) m.tag(idx("z", t), s.z[t]);
  for (std::size_t t = 1; t <= T; ++t) m.tag(idx("zb", t), s.zb[t]);
  m.tag("delta", s.delta);
  return s;
}

}  // namespace

MilpModel build_ott(const GridCase& grid, const Topology& z0, const Topology& zT, const std::vector<double>& pg_star,
                    const OttConfig& cfg) {
  cfg.validate(grid);
  grid.check_topology(z0);
  grid.check_topology(zT);
  if (pg_star.size() != grid.num_buses()) throw InvalidInput("p_g* must have one entry per bus");
  const std::size_t T = cfg.T_u, nE = grid.num_branches();
  const Weights& w = cfg.weights;
  const std::vector<double> wb = cfg.property_weights.boundedness(nE);
  const std::vector<double> wv = cfg.property_weights.volatility(nE);

  const std::vector<double> P0 = property_values(grid, dcflow::solve_dc_flow(grid, z0, pg_star));
  const std::vector<double> PT = property_values(grid, dcflow::solve_dc_flow(grid, zT, pg_star));
  std::vector<double> pmax(P0.size()), pmin(P0.size());
  for (std::size_t k = 0; k < P0.size(); ++k) {
    pmax[k] = std::max(P0[k], PT[k]);
    pmin[k] = std::min(P0[k], PT[k]);
  }

  MilpModel m;
  const BigM M = big_m(grid, cfg.big_m_floor, &pg_star);
  std::vector<VarGroup> z(T + 1);
  z[0] = fixed_topology_vars(m, grid, z0, "z.0");
  for (std::size_t t = 1; t < T; ++t) {
    z[t] = topology_vars(m, grid, idx("z", t));
    if (cfg.necessary_only)
      for (std::size_t e = 0; e < nE; ++e)
        if (z0[e] == zT[e]) m.fix(z[t][e], z0[e] ? 1.0 : 0.0);
  }
  z[T] = fixed_topology_vars(m, grid, zT, idx("z", T));
  TransitionSkeleton s = add_transition_skeleton(m, grid, cfg, std::move(z), M);

  const double required_total = static_cast<double>(hamming_distance(z0, zT));
  add_switch_budget(m, s.abs_by_t, constant_expr(required_total + static_cast<double>(cfg.n_e)));
  if (cfg.necessary_only) {
    std::vector<Expr> req(nE);
    for (std::size_t e = 0; e < nE; ++e) req[e] = constant_expr(z0[e] != zT[e] ? 1.0 : 0.0);
    add_necessary_only(m, grid, s.abs_by_t, req);
  }

  Injection inj;
  inj.fixed_pg = &pg_star;
  std::vector<std::vector<Expr>> props(T + 1);
  props[0] = constant_properties(P0);
  props[T] = constant_properties(PT);
  for (std::size_t t = 1; t < T; ++t) {
    const FlowVars f = add_feasible_region(m, grid, s.z[t], dcflow::LimitSet::normal, inj, true, M, idx("tr", t));
    for (std::size_t v : f.slack) m.add_objective(v, w.alpha_p);
    tag_flow(m, f, "theta", "pl", "xi", t);
    props[t] = properties_of(grid, f);
  }
  for (std::size_t t = 1; t <= T; ++t) {
    const FlowVars f = add_feasible_region(m, grid, s.zb[t], dcflow::LimitSet::relaxed, inj, true, M, idx("im", t));
    for (std::size_t v : f.slack) m.add_objective(v, w.alpha_p);
    tag_flow(m, f, "theta_r", "plr", "xir", t);
  }

  EnvelopeRef env;
  env.pmax_value = &pmax;
  env.pmin_value = &pmin;
  for (std::size_t t = 1; t < T; ++t)
    tag_boundedness(m, add_boundedness_auxiliaries(m, props[t], wb, env, w.alpha_b * cfg.duration(t),
                                                   cfg.boundedness, idx("b", t)),
                    t);
  double terminal = 0.0;
  for (std::size_t k = 0; k < P0.size(); ++k) terminal += wv[k] * std::abs(P0[k] - PT[k]);
  m.add_objective_constant(-w.alpha_v * terminal);
  for (std::size_t t = 1; t <= T; ++t)
    m.tag(idx("vol", t), add_volatility_terms(m, props[t], props[t - 1], wv, w.alpha_v, idx("v", t)));

  m.tag("kind.ott", {});
  m.seal();
  return m;
}

MilpModel build_tetop(const GridCase& grid, const Topology& z0, const TetopConfig& tc) {
  tc.validate(grid);
  grid.check_topology(z0);
  const OttConfig& cfg = tc.ott;
  const std::size_t T = cfg.T_u, nE = grid.num_branches();
  const Weights& w = cfg.weights;
  const std::vector<double> wb = cfg.property_weights.boundedness(nE);
  const std::vector<double> wv = cfg.property_weights.volatility(nE);

  MilpModel m;
  const BigM M = big_m(grid, cfg.big_m_floor, nullptr);
  VarGroup cost;
  const VarGroup pg = add_dispatch(m, grid, tc.beta, cost);
  m.tag("pg", pg);
  m.tag("pgcost", cost);

  std::vector<VarGroup> z(T + 1);
  z[0] = fixed_topology_vars(m, grid, z0, "z.0");
  for (std::size_t t = 1; t <= T; ++t) z[t] = topology_vars(m, grid, idx("z", t));
  TransitionSkeleton s = add_transition_skeleton(m, grid, cfg, std::move(z), M);
  const VarGroup& zT = s.z[T];

  // Terminal topology membership: budget against z_0 and minimum line count.
  // Connectedness of z_{T_u} follows from that of z^b_{T_u} <= z_{T_u}.
  std::vector<Expr> dist(nE);
  Expr dist_total;
  for (std::size_t e = 0; e < nE; ++e) {
    dist[e] = distance_expr(zT[e], z0[e]);
    accumulate(dist_total, dist[e], 1.0);
  }
  if (tc.n_s < nE) add_expr_row(m, dist_total, Sense::le, static_cast<double>(tc.n_s));
  if (tc.n_s_min > 0) {
    std::vector<Term> on;
    for (std::size_t v : zT) on.push_back(Term{v, 1.0});
    m.add_row(on, Sense::ge, static_cast<double>(tc.n_s_min));
  }
  Expr limit = dist_total;
  limit.constant += static_cast<double>(cfg.n_e);
  add_switch_budget(m, s.abs_by_t, limit);
  if (cfg.necessary_only) add_necessary_only(m, grid, s.abs_by_t, dist);

  Injection inj;
  inj.pg = &pg;
  std::vector<std::vector<Expr>> props(T + 1);
  for (std::size_t t = 0; t <= T; ++t) {
    const FlowVars f = add_feasible_region(m, grid, s.z[t], dcflow::LimitSet::normal, inj, false, M, idx("tr", t));
    tag_flow(m, f, "theta", "pl", "xi", t);
    props[t] = properties_of(grid, f);
  }
  for (std::size_t t = 1; t <= T; ++t) {
    const FlowVars f = add_feasible_region(m, grid, s.zb[t], dcflow::LimitSet::relaxed, inj, false, M, idx("im", t));
    tag_flow(m, f, "theta_r", "plr", "xir", t);
  }

  // Envelope P_max = max(P_0, P_{T_u}), P_min = min(...) with eta_1 + eta_2 = 1
  // selecting which endpoint attains the maximum.
  const std::size_t K = 2 * nE;
  VarGroup pmax(K, kNoVar), pmin(K, kNoVar), eta1(K, kNoVar), eta2(K, kNoVar);
  for (std::size_t k = 0; k < K; ++k) {
    if (wb[k] <= 0.0 && wv[k] <= 0.0) continue;
    const std::size_t e = k % nE;
    const double bound = k < nE ? grid.branch(e).p_max : std::max(grid.branch(e).theta_max, M.angle_span);
    const double Me = 2.0 * bound + 1.0;
    pmax[k] = m.add_continuous("pmax." + std::to_string(k), -bound - 1.0, bound + 1.0, -w.alpha_v * wv[k]);
    pmin[k] = m.add_continuous("pmin." + std::to_string(k), -bound - 1.0, bound + 1.0, w.alpha_v * wv[k]);
    eta1[k] = m.add_binary("eta1." + std::to_string(k));
    eta2[k] = m.add_binary("eta2." + std::to_string(k));
    m.add_row({Term{eta1[k], 1.0}, Term{eta2[k], 1.0}}, Sense::eq, 1.0);
    Expr sum = var_expr(pmax[k]);
    accumulate(sum, var_expr(pmin[k]), 1.0);
    accumulate(sum, props[0][k], -1.0);
    accumulate(sum, props[T][k], -1.0);
    add_expr_row(m, sum, Sense::eq, 0.0);
    for (int side = 0; side < 2; ++side) {
      const Expr& P = side == 0 ? props[0][k] : props[T][k];
      const std::size_t eta = side == 0 ? eta1[k] : eta2[k];
      Expr ge = difference(var_expr(pmax[k]), P);
      add_expr_row(m, ge, Sense::ge, 0.0);
      Expr le = ge;
      accumulate(le, var_expr(eta), Me);
      add_expr_row(m, le, Sense::le, Me);
    }
  }
  m.tag("pmax", pmax);
  m.tag("pmin", pmin);
  m.tag("eta1", eta1);
  m.tag("eta2", eta2);

  EnvelopeRef env;
  env.pmax_var = &pmax;
  env.pmin_var = &pmin;
  for (std::size_t t = 1; t < T; ++t)
    tag_boundedness(m, add_boundedness_auxiliaries(m, props[t], wb, env, w.alpha_b * cfg.duration(t),
                                                   cfg.boundedness, idx("b", t)),
                    t);
  for (std::size_t t = 1; t <= T; ++t)
    m.tag(idx("vol", t), add_volatility_terms(m, props[t], props[t - 1], wv, w.alpha_v, idx("v", t)));

  m.tag("kind.tetop", {});
  m.seal();
  return m;
}

// --- warm-start encoding ---------------------------------------------------

namespace {

// Unit-conductance potential flow carrying c over the on-branches of z.
std::optional<std::pair<std::vector<double>, std::vector<double>>> commodity_flow(const GridCase& grid,
                                                                                   const Topology& z) {
  if (!is_connected(grid, z)) return std::nullopt;
  const std::size_t nV = grid.num_buses(), ref = grid.reference_index();
  std::vector<std::size_t> pos(nV, GridCase::npos);
  std::size_t n = 0;
  for (std::size_t i = 0; i < nV; ++i)
    if (i != ref) pos[i] = n++;
  std::vector<double> phi(nV, 0.0), rho(grid.num_branches(), 0.0);
  if (n > 0) {
    Matrix L(n, n);
    for (std::size_t e = 0; e < grid.num_branches(); ++e) {
      if (!z[e]) continue;
      const std::size_t a = pos[grid.from_index(e)], b = pos[grid.to_index(e)];
      if (a != GridCase::npos) L(a, a) += 1.0;
      if (b != GridCase::npos) L(b, b) += 1.0;
      if (a != GridCase::npos && b != GridCase::npos) {
        L(a, b) -= 1.0;
        L(b, a) -= 1.0;
      }
    }
    auto lu = LuFactorization::factor(L, dcflow::kPivotThreshold);
    if (!lu) return std::nullopt;
    const std::vector<double> c = uniquely_balanced_vector(grid);
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < nV; ++i)
      if (pos[i] != GridCase::npos) rhs[pos[i]] = c[i];
    const std::vector<double> sol = lu->solve(rhs);
    for (std::size_t i = 0; i < nV; ++i)
      if (pos[i] != GridCase::npos) phi[i] = sol[pos[i]];
  }
  for (std::size_t e = 0; e < grid.num_branches(); ++e)
    if (z[e]) rho[e] = phi[grid.from_index(e)] - phi[grid.to_index(e)];
  return std::make_pair(std::move(phi), std::move(rho));
}

void put(std::vector<double>& x, const VarGroup& g, const std::vector<double>& v) {
  for (std::size_t k = 0; k < g.size(); ++k)
    if (g[k] != kNoVar) x[g[k]] = v[k];
}

void put_topology(std::vector<double>& x, const VarGroup& g, const Topology& z) {
  for (std::size_t e = 0; e < g.size(); ++e) x[g[e]] = z[e] ? 1.0 : 0.0;
}

// Fills theta, p_l and (when tagged) slacks of one system.
bool put_flow(std::vector<double>& x, const GridCase& grid, const MilpModel& model, const Topology& z,
              const std::vector<double>& pg, dcflow::LimitSet limits, const std::string& theta,
              const std::string& pl, const std::string& xi, std::vector<double>* props_out) {
  dcflow::FlowState s;
  try {
    s = dcflow::solve_dc_flow(grid, z, pg);
  } catch (const Disconnected&) {
    return false;
  }
  if (props_out) *props_out = property_values(grid, s);
  if (!model.has_group(theta)) return true;
  put(x, model.group(theta), s.theta);
  put(x, model.group(pl), s.p_l);
  if (model.has_group(xi)) {
    const dcflow::ViolationReport r = dcflow::check_limits(grid, z, s, limits);
    std::vector<double> slack(r.angle);
    slack.insert(slack.end(), r.flow.begin(), r.flow.end());
    put(x, model.group(xi), slack);
  }
  return true;
}

}  // namespace

std::optional<std::vector<double>> encode_trajectory(const GridCase& grid, const MilpModel& model,
                                                     const std::vector<Topology>& topologies,
                                                     const std::vector<double>& pg, double tolerance) {
  if (topologies.empty()) throw InvalidInput("trajectory has no topologies");
  if (pg.size() != grid.num_buses()) throw InvalidInput("dispatch must have one entry per bus");
  const bool tetop = model.has_group("kind.tetop");
  if (!tetop && !model.has_group("kind.ott")) throw InvalidInput("model is not an OTT or TETOP model");
  const std::size_t T = model.group("delta").size();
  if (topologies.size() > T + 1) return std::nullopt;
  for (const Topology& z : topologies) grid.check_topology(z);

  std::vector<Topology> zt(T + 1);
  for (std::size_t t = 0; t <= T; ++t) zt[t] = topologies[std::min(t, topologies.size() - 1)];

  std::vector<double> x(model.num_variables(), 0.0);
  for (std::size_t j = 0; j < x.size(); ++j) {
    const auto& v = model.variable(j);
    if (v.lower == v.upper) x[j] = v.lower;
  }

  const VarGroup& delta = model.group("delta");
  for (std::size_t t = 0; t <= T; ++t) put_topology(x, model.group(idx("z", t)), zt[t]);
  for (std::size_t t = 1; t <= T; ++t) {
    const Topology zb = intersection_topology(zt[t], zt[t - 1]);
    put_topology(x, model.group(idx("zb", t)), zb);
    x[delta[t - 1]] = zt[t] != zt[t - 1] ? 1.0 : 0.0;
    if (model.has_group(idx("u", t))) {
      std::size_t agent = GridCase::npos;
      for (std::size_t e : changed_branches(zt[t - 1], zt[t])) {
        const std::size_t a = grid.agent_of(e);
        if (agent != GridCase::npos && a != agent) return std::nullopt;
        agent = a;
      }
      if (agent == GridCase::npos) agent = 0;
      const VarGroup& u = model.group(idx("u", t));
      for (std::size_t k = 0; k < u.size(); ++k) x[u[k]] = k == agent ? 1.0 : 0.0;
    }
    auto flow = commodity_flow(grid, zb);
    if (!flow) return std::nullopt;
    put(x, model.group(idx("conn_phi", t)), flow->first);
    put(x, model.group(idx("conn_rho", t)), flow->second);
  }

  // Normal-limit steady states at every padded topology; the model holds
  // variables only for the transitional ones.
  std::vector<std::vector<double>> P(T + 1);
  for (std::size_t t = 0; t <= T; ++t)
    if (!put_flow(x, grid, model, zt[t], pg, dcflow::LimitSet::normal, idx("theta", t), idx("pl", t),
                  idx("xi", t), &P[t]))
      return std::nullopt;
  for (std::size_t t = 1; t <= T; ++t)
    if (!put_flow(x, grid, model, intersection_topology(zt[t], zt[t - 1]), pg, dcflow::LimitSet::relaxed,
                  idx("theta_r", t), idx("plr", t), idx("xir", t), nullptr))
      return std::nullopt;

  const std::size_t K = P[0].size();
  std::vector<double> pmax(K), pmin(K);
  for (std::size_t k = 0; k < K; ++k) {
    pmax[k] = std::max(P[0][k], P[T][k]);
    pmin[k] = std::min(P[0][k], P[T][k]);
  }
  if (tetop) {
    put(x, model.group("pg"), pg);
    const VarGroup& cost = model.group("pgcost");
    for (std::size_t i = 0; i < cost.size(); ++i)
      if (cost[i] != kNoVar) x[cost[i]] = epigraph_value(grid.bus(i), pg[i]);
    put(x, model.group("pmax"), pmax);
    put(x, model.group("pmin"), pmin);
    std::vector<double> e1(K), e2(K);
    for (std::size_t k = 0; k < K; ++k) {
      e1[k] = P[0][k] >= P[T][k] ? 1.0 : 0.0;
      e2[k] = 1.0 - e1[k];
    }
    put(x, model.group("eta1"), e1);
    put(x, model.group("eta2"), e2);
  }
  for (std::size_t t = 1; t < T; ++t) {
    if (!model.has_group(idx("rho0p", t))) continue;
    std::vector<double> r0p(K), r0m(K), rTp(K), rTm(K);
    for (std::size_t k = 0; k < K; ++k) {
      r0p[k] = std::max(0.0, P[t][k] - pmax[k]);
      r0m[k] = std::max(0.0, pmax[k] - P[t][k]);
      rTp[k] = std::max(0.0, pmin[k] - P[t][k]);
      rTm[k] = std::max(0.0, P[t][k] - pmin[k]);
    }
    put(x, model.group(idx("rho0p", t)), r0p);
    put(x, model.group(idx("rho0m", t)), r0m);
    put(x, model.group(idx("rhoTp", t)), rTp);
    put(x, model.group(idx("rhoTm", t)), rTm);
  }
  for (std::size_t t = 1; t <= T; ++t) {
    std::vector<double> a(K);
    for (std::size_t k = 0; k < K; ++k) a[k] = std::abs(P[t][k] - P[t - 1][k]);
    put(x, model.group(idx("vol", t)), a);
  }

  if (model.max_violation(x) > tolerance) return std::nullopt;
  return x;
}

OtsSolution decode_ots(const GridCase& grid, const MilpModel& model, const std::vector<double>& x) {
  OtsSolution s;
  const VarGroup& z = model.group("z");
  s.z = Topology(grid.num_branches(), false);
  for (std::size_t e = 0; e < z.size(); ++e) s.z.set(e, x[z[e]] > 0.5);
  const VarGroup& pg = model.group("pg");
  s.pg.resize(pg.size());
  for (std::size_t i = 0; i < pg.size(); ++i) s.pg[i] = x[pg[i]];
  s.cost = dcflow::dispatch_cost(grid, s.pg);
  return s;
}

}  // namespace formulations
}  // namespace ott
