#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace ott::milp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
// Marks a slot of a tag group that has no variable behind it.
inline constexpr std::size_t kNoVar = static_cast<std::size_t>(-1);

enum class VarKind { continuous, binary };
enum class Sense { le, eq, ge };

struct Variable {
  std::string name;
  VarKind kind = VarKind::continuous;
  double lower = 0.0;
  double upper = kInf;
  double objective = 0.0;
};

struct Term {
  std::size_t var;
  double coef;
};

struct Row {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::le;
  double rhs = 0.0;
};

// objective += coef * x_i * x_j; only carried into MPS export.
struct QuadTerm {
  std::size_t i;
  std::size_t j;
  double coef;
};

class MilpModel {
 public:
  std::size_t add_variable(std::string name, VarKind kind, double lower, double upper,
                           double objective = 0.0);
  std::size_t add_binary(std::string name, double objective = 0.0) {
    return add_variable(std::move(name), VarKind::binary, 0.0, 1.0, objective);
  }
  std::size_t add_continuous(std::string name, double lower, double upper, double objective = 0.0) {
    return add_variable(std::move(name), VarKind::continuous, lower, upper, objective);
  }

  // Duplicate variable references in `terms` are merged; zero coefficients dropped.
  std::size_t add_row(std::vector<Term> terms, Sense sense, double rhs, std::string name = {});

  void add_objective(std::size_t var, double coef);
  void add_objective_constant(double c);
  void add_quadratic_objective(std::size_t i, std::size_t j, double coef);
  void set_bounds(std::size_t var, double lower, double upper);
  void fix(std::size_t var, double value) { set_bounds(var, value, value); }

  // Tag groups map formulation roles to variable indices (kNoVar allowed).
  void tag(const std::string& group, std::vector<std::size_t> vars);
  bool has_group(const std::string& group) const { return tags_.count(group) != 0; }
  const std::vector<std::size_t>& group(const std::string& group) const;
  const std::map<std::string, std::vector<std::size_t>>& tags() const { return tags_; }

  // Validates invariants and freezes the model. Throws InvalidInput.
  void seal();
  bool sealed() const { return sealed_; }

  std::size_t num_variables() const { return vars_.size(); }
  std::size_t num_rows() const { return rows_.size(); }
  std::size_t num_binaries() const;
  const Variable& variable(std::size_t j) const { return vars_[j]; }
  const std::vector<Variable>& variables() const { return vars_; }
  const Row& row(std::size_t i) const { return rows_[i]; }
  const std::vector<Row>& rows() const { return rows_; }
  double objective_constant() const { return objective_constant_; }
  const std::vector<QuadTerm>& quadratic_objective() const { return quad_; }

  // Linear objective plus constant (quadratic terms included when present).
  double objective_value(std::span<const double> x) const;
  // Largest violation over rows, bounds and binary integrality.
  double max_violation(std::span<const double> x) const;
  double row_activity(std::size_t i, std::span<const double> x) const;

 private:
  void require_open() const;

  std::vector<Variable> vars_;
  std::vector<Row> rows_;
  std::vector<QuadTerm> quad_;
  std::map<std::string, std::vector<std::size_t>> tags_;
  double objective_constant_ = 0.0;
  bool sealed_ = false;
};

enum class SolveStatus { optimal, infeasible, unbounded, gap_limit, node_limit };

const char* to_string(SolveStatus s);

struct SolveOutcome {
  SolveStatus status = SolveStatus::infeasible;
  std::vector<double> assignment;
  double objective = kInf;
  double bound = -kInf;
  std::size_t nodes = 0;
  std::size_t lp_iterations = 0;
  double wall_seconds = 0.0;

  bool has_solution() const { return !assignment.empty(); }
};

}  // namespace ott::milp
