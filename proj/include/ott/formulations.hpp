#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ott/dcflow.hpp"
#include "ott/grid.hpp"
#include "ott/milp/model.hpp"

namespace ott {

enum class SwitchMode { ss, as };
enum class BoundednessVariant { l1, quadratic_export };

struct Weights {
  double alpha_b = 1.0;
  double alpha_v = 1.0;
  double alpha_c = 1e6;
  double alpha_p = 1e9;
  double alpha_n = 1e-3;
};

// Monitored properties are indexed k = 0..2|E|-1: branch flows first, then
// branch angle differences. Empty vectors take the defaults (flows 1, angles 0).
struct PropertyWeights {
  std::vector<double> w_b_flow, w_v_flow, w_b_angle, w_v_angle;

  std::vector<double> boundedness(std::size_t num_branches) const;
  std::vector<double> volatility(std::size_t num_branches) const;
};

struct OttConfig {
  std::size_t T_u = 2;
  SwitchMode mode = SwitchMode::ss;
  Weights weights;
  PropertyWeights property_weights;
  std::size_t n_e = 0;
  std::vector<double> durations;  // d_1..d_{T_u-1}; empty means all 1
  double big_m_floor = 1e4;
  BoundednessVariant boundedness = BoundednessVariant::l1;
  bool necessary_only = false;
  bool single_switch_batches = false;  // 1'|z_t - z_{t-1}| = delta_t

  // Throws InvalidInput on a violated weight ordering, bad sizes, or AS mode
  // without an agent partition.
  void validate(const GridCase& grid) const;
  double duration(std::size_t t) const;  // t in 1..T_u-1, 1 when unspecified
};

struct TetopConfig {
  OttConfig ott;
  double beta = 1e9;
  std::size_t n_s = static_cast<std::size_t>(-1);  // terminal switch budget vs z_0
  std::size_t n_s_min = 0;                          // minimum on-branch count

  void validate(const GridCase& grid) const;
};

namespace formulations {

using milp::MilpModel;
using VarGroup = std::vector<std::size_t>;

struct BigM {
  double delta = 1.0;       // delta linking, |E|
  double conn_flow = 1.0;   // |rho| <= M g
  double conn_angle = 1.0;  // |E'phi - rho| <= M (1 - g)
  double angle = 1.0;       // angle-limit and DC-flow indicators
  double dc = 1.0;
  double angle_span = 1.0;  // largest angle difference in any connected topology
  double flow_span = 1.0;   // largest branch flow magnitude
};

// Big-M values per constraint family. `fixed_pg`, when given, tightens the
// flow bound to the actual injections.
BigM big_m(const GridCase& grid, double floor, const std::vector<double>* fixed_pg = nullptr);

struct Expr {
  std::vector<milp::Term> terms;
  double constant = 0.0;
};

// Monitored property k of a system as a linear expression.
Expr property_expr(const GridCase& grid, const VarGroup& theta, const VarGroup& p_l, std::size_t k);
// Monitored property values of a solved flow state.
std::vector<double> property_values(const GridCase& grid, const dcflow::FlowState& s);

// zb = z_t o z_prev via z^b <= z_t, z^b <= z_prev, z^b >= z_t + z_prev - 1.
void add_product_linearization(MilpModel& m, const VarGroup& z_t, const VarGroup& z_prev,
                               const VarGroup& zb);
// Per branch z_t + z_prev - 2 z^b, equal to |z_t - z_prev| on binaries.
std::vector<Expr> abs_expansion(const VarGroup& z_t, const VarGroup& z_prev, const VarGroup& zb);

// 1'|dz_t| <= M delta_t and 1'|dz_t| >= delta_t for every t.
void add_delta_linking(MilpModel& m, const std::vector<std::vector<Expr>>& abs_by_t,
                       const VarGroup& delta, double M);
// Keeps delta of the form 1..10..0. For three or more entries these are the
// four cover inequalities per window; for two entries the window family is
// empty and delta_2 <= delta_1 is added instead.
void add_sameness_exclusion(MilpModel& m, const VarGroup& delta);

struct ConnectednessVars {
  VarGroup phi;  // potentials, |V|
  VarGroup rho;  // commodity flows, |E|
};
// E rho = c, |rho| <= M g, |E'phi - rho| <= M (1 - g): feasible iff the gated
// branches span the network.
ConnectednessVars add_connectedness(MilpModel& m, const GridCase& grid, const VarGroup& gate,
                                    const BigM& M, const std::string& tag);

struct Injection {
  const std::vector<double>* fixed_pg = nullptr;  // frozen dispatch
  const VarGroup* pg = nullptr;                   // dispatch variables
};

struct FlowVars {
  VarGroup theta;  // |V|, reference fixed at 0
  VarGroup p_l;    // |E|
  VarGroup slack;  // 2|E|: angle slacks then flow slacks; empty when strict
};
// DC steady state and limits of one system gated by `gate`.
FlowVars add_feasible_region(MilpModel& m, const GridCase& grid, const VarGroup& gate,
                             dcflow::LimitSet limits, const Injection& inj, bool with_slack,
                             const BigM& M, const std::string& tag);

struct EnvelopeRef {
  // Either constants or variables per property.
  const std::vector<double>* pmax_value = nullptr;
  const std::vector<double>* pmin_value = nullptr;
  const VarGroup* pmax_var = nullptr;
  const VarGroup* pmin_var = nullptr;
};
struct BoundednessVars {
  VarGroup rho0_plus, rho0_minus, rhoT_plus, rhoT_minus;  // kNoVar where w_b = 0
};
// P - P_max = rho0+ - rho0-, P_min - P = rhoT+ - rhoT-; objective weight
// `scale`*w_b on rho0+ + rhoT+ (L1) or on its square (quadratic export).
BoundednessVars add_boundedness_auxiliaries(MilpModel& m, const std::vector<Expr>& props,
                                            const std::vector<double>& w_b, const EnvelopeRef& env,
                                            double scale, BoundednessVariant variant,
                                            const std::string& tag);
// a_k >= |P_k - Q_k| with objective scale*w_v on a_k. kNoVar where w_v = 0.
VarGroup add_volatility_terms(MilpModel& m, const std::vector<Expr>& now, const std::vector<Expr>& before,
                              const std::vector<double>& w_v, double scale, const std::string& tag);

// u_t (one per agent) with 1'u_t = 1 and the complement sandwich; allows
// batches inside a single agent set and empty batches.
VarGroup add_as_mode(MilpModel& m, const GridCase& grid, const std::vector<Expr>& abs_t,
                     const std::string& tag);

// sum_t 1'|dz_t| <= limit (limit may carry variables, TETOP).
void add_switch_budget(MilpModel& m, const std::vector<std::vector<Expr>>& abs_by_t, const Expr& limit);
// Per switchable branch e: sum_t |dz_t,e| = required_e.
void add_necessary_only(MilpModel& m, const GridCase& grid, const std::vector<std::vector<Expr>>& abs_by_t,
                        const std::vector<Expr>& required);

// --- complete models -------------------------------------------------------

// DC OTS around initial topology z0: minimum dispatch cost over z, p_g.
MilpModel build_dc_ots(const GridCase& grid, const Topology& z0, std::size_t n_s, std::size_t n_s_min,
                       double big_m_floor = 1e4);

MilpModel build_ott(const GridCase& grid, const Topology& z0, const Topology& zT,
                    const std::vector<double>& pg_star, const OttConfig& cfg);

MilpModel build_tetop(const GridCase& grid, const Topology& z0, const TetopConfig& cfg);

// Encodes a trajectory (padded to the model horizon with its last topology)
// as a complete assignment of a model from build_ott / build_tetop.
// Intermediate auxiliaries are recomputed from DC steady states; violations
// land in the slacks. Returns nullopt when the trajectory does not fit the
// model (too long, disconnected intersection, budget or ownership breach).
std::optional<std::vector<double>> encode_trajectory(const GridCase& grid, const MilpModel& model,
                                                     const std::vector<Topology>& topologies,
                                                     const std::vector<double>& pg,
                                                     double tolerance = 1e-6);

// Topologies and dispatch read back from an OTS solution.
struct OtsSolution {
  Topology z;
  std::vector<double> pg;
  double cost = 0.0;
};
OtsSolution decode_ots(const GridCase& grid, const MilpModel& model, const std::vector<double>& x);

}  // namespace formulations
}  // namespace ott
