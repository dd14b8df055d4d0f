#include "ott/milp/model.hpp"

#include <algorithm>
#include <cmath>

#include "ott/error.hpp"

namespace ott::milp {

void MilpModel::require_open() const {
  if (sealed_) throw InvalidInput("model is sealed");
}

std::size_t MilpModel::add_variable(std::string name, VarKind kind, double lower, double upper,
                                    double objective) {
  require_open();
  if (kind == VarKind::binary) {
    lower = std::max(lower, 0.0);
    upper = std::min(upper, 1.0);
  }
  vars_.push_back(Variable{std::move(name), kind, lower, upper, objective});
  return vars_.size() - 1;
}

std::size_t MilpModel::add_row(std::vector<Term> terms, Sense sense, double rhs, std::string name) {
  require_open();
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
  std::vector<Term> merged;
  merged.reserve(terms.size());
  for (const Term& t : terms) {
    if (t.var >= vars_.size()) throw InvalidInput("row references undeclared variable");
    if (!merged.empty() && merged.back().var == t.var)
      merged.back().coef += t.coef;
    else
      merged.push_back(t);
  }
  std::erase_if(merged, [](const Term& t) { return t.coef == 0.0; });
  rows_.push_back(Row{std::move(name), std::move(merged), sense, rhs});
  return rows_.size() - 1;
}

void MilpModel::add_objective(std::size_t var, double coef) {
  require_open();
  vars_.at(var).objective += coef;
}

void MilpModel::add_objective_constant(double c) {
  require_open();
  objective_constant_ += c;
}

void MilpModel::add_quadratic_objective(std::size_t i, std::size_t j, double coef) {
  require_open();
  if (i >= vars_.size() || j >= vars_.size()) throw InvalidInput("quadratic term references undeclared variable");
  if (i > j) std::swap(i, j);
  quad_.push_back(QuadTerm{i, j, coef});
}

void MilpModel::set_bounds(std::size_t var, double lower, double upper) {
  require_open();
  Variable& v = vars_.at(var);
  v.lower = lower;
  v.upper = upper;
}

void MilpModel::tag(const std::string& group, std::vector<std::size_t> vars) {
  require_open();
  tags_[group] = std::move(vars);
}

const std::vector<std::size_t>& MilpModel::group(const std::string& group) const {
  auto it = tags_.find(group);
  if (it == tags_.end()) throw InvalidInput("model has no variable group '" + group + "'");
  return it->second;
}

void MilpModel::seal() {
  if (sealed_) return;
  for (const Variable& v : vars_) {
    if (std::isnan(v.lower) || std::isnan(v.upper) || std::isnan(v.objective))
      throw InvalidInput("variable " + v.name + " has NaN data");
    if (v.lower > v.upper) throw InvalidInput("variable " + v.name + " has crossed bounds");
    if (v.kind == VarKind::binary && (v.lower < 0.0 || v.upper > 1.0))
      throw InvalidInput("binary " + v.name + " must have bounds within [0,1]");
  }
  for (const Row& r : rows_) {
    if (std::isnan(r.rhs)) throw InvalidInput("row " + r.name + " has NaN rhs");
    for (const Term& t : r.terms)
      if (!std::isfinite(t.coef)) throw InvalidInput("row " + r.name + " has non-finite coefficient");
  }
  for (const auto& [name, vars] : tags_)
    for (std::size_t v : vars)
      if (v != kNoVar && v >= vars_.size()) throw InvalidInput("tag group " + name + " out of range");
  sealed_ = true;
}

std::size_t MilpModel::num_binaries() const {
  return static_cast<std::size_t>(std::count_if(
      vars_.begin(), vars_.end(), [](const Variable& v) { return v.kind == VarKind::binary; }));
}

double MilpModel::row_activity(std::size_t i, std::span<const double> x) const {
  double s = 0.0;
  for (const Term& t : rows_[i].terms) s += t.coef * x[t.var];
  return s;
}

double MilpModel::objective_value(std::span<const double> x) const {
  double obj = objective_constant_;
  for (std::size_t j = 0; j < vars_.size(); ++j) obj += vars_[j].objective * x[j];
  for (const QuadTerm& q : quad_) obj += q.coef * x[q.i] * x[q.j];
  return obj;
}

double MilpModel::max_violation(std::span<const double> x) const {
  if (x.size() != vars_.size()) return kInf;
  double worst = 0.0;
  for (std::size_t j = 0; j < vars_.size(); ++j) {
    const Variable& v = vars_[j];
    worst = std::max({worst, v.lower - x[j], x[j] - v.upper});
    if (v.kind == VarKind::binary) worst = std::max(worst, std::abs(x[j] - std::round(x[j])));
  }
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const double a = row_activity(i, x);
    const Row& r = rows_[i];
    switch (r.sense) {
      case Sense::le: worst = std::max(worst, a - r.rhs); break;
      case Sense::ge: worst = std::max(worst, r.rhs - a); break;
      case Sense::eq: worst = std::max(worst, std::abs(a - r.rhs)); break;
    }
  }
  return worst;
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::gap_limit: return "gap-limit";
    case SolveStatus::node_limit: return "node-limit";
  }
  return "unknown";
}

}  // namespace ott::milp
