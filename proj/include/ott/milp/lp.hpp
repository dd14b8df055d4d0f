#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ott/linalg.hpp"
#include "ott/milp/model.hpp"

namespace ott::milp {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpOptions {
  double primal_tol = 1e-7;
  // Reduced-cost tolerance is max(dual_floor, dual_rel * max|c|).
  double dual_floor = 1e-9;
  double dual_rel = 1e-11;
  double pivot_tol = 1e-9;
  std::size_t refactor_interval = 400;
  bool parallel_pivot = true;
};

// Dense bounded-variable simplex over a model with binaries relaxed to their
// bounds. Columns fixed by the root bounds are folded into the right-hand
// side and singleton rows become bounds. The basis survives bound changes, so
// re-solves after branching start from the previous optimum (dual simplex).
class LpEngine {
 public:
  explicit LpEngine(const MilpModel& model, LpOptions options = {});

  // Bounds in model index space, intersected with the root bounds.
  void set_bounds(std::size_t var, double lower, double upper);
  void reset_bounds();

  LpStatus solve();

  // Model-space values and objective (including the model constant).
  double objective() const { return objective_; }
  std::vector<double> solution() const;
  std::size_t iterations() const { return iterations_; }
  std::size_t num_rows() const { return m_; }
  std::size_t num_columns() const { return n_; }

  // Root bounds after singleton-row tightening.
  double root_lower(std::size_t var) const { return root_lo_[var]; }
  double root_upper(std::size_t var) const { return root_up_[var]; }

 private:
  enum class State : std::uint8_t { basic, lower, upper, zero };

  void presolve(const MilpModel& model);
  void build_tableau();
  bool refactor();
  void reset_to_slack_basis();
  void refresh_primal();
  void refresh_dual();
  void place_nonbasic();
  bool primal_feasible() const;
  bool dual_feasible() const;
  double dual_tol() const { return dual_tol_; }

  enum class Phase { one, two };
  LpStatus primal(Phase phase);
  LpStatus dual();
  LpStatus dual_loop();
  void pivot(std::size_t r, std::size_t q);
  void count_iteration(bool degenerate);
  double compute_objective() const;

  const MilpModel* model_;
  LpOptions opt_;

  // Model-space data.
  std::size_t nv_ = 0;
  std::vector<double> root_lo_, root_up_;
  std::vector<double> cur_lo_, cur_up_;
  std::vector<std::size_t> col_of_;  // model var -> column or npos
  std::vector<std::size_t> var_of_;  // column -> model var
  bool root_infeasible_ = false;
  bool bounds_infeasible_ = false;
  double fixed_cost_ = 0.0;

  // Engine data: n structural columns then m logicals.
  std::size_t n_ = 0, m_ = 0;
  std::vector<std::vector<std::pair<std::size_t, double>>> acol_;
  std::vector<double> b_;
  std::vector<double> cost_, lo_, up_, x_, d_;
  std::vector<State> state_;
  std::vector<std::size_t> head_;
  Matrix t_;
  std::vector<std::size_t> nz_;
  double dual_tol_ = 1e-9;

  std::size_t iterations_ = 0;
  std::size_t since_refactor_ = 0;
  std::size_t degenerate_run_ = 0;
  bool bland_ = false;
  double objective_ = 0.0;
};

// Solves the LP relaxation of `model`.
SolveOutcome solve_lp(const MilpModel& model, LpOptions options = {});

}  // namespace ott::milp
