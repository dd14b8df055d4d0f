#include "ott/milp/mps.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <unistd.h>

#include "ott/error.hpp"

namespace ott::milp {

namespace {

// Widest %g rendering that fits the 12-character numeric field.
std::string number(double v) {
  char buf[40];
  for (int p = 12; p >= 1; --p) {
    std::snprintf(buf, sizeof buf, "%.*g", p, v);
    if (std::string(buf).size() <= 12) return buf;
  }
  return buf;
}

class Line {
 public:
  Line& at(std::size_t col, const std::string& s) {
    if (text_.size() < col - 1) text_.append(col - 1 - text_.size(), ' ');
    text_ += s;
    return *this;
  }
  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

void entry(std::ostream& os, const std::string& f1, const std::string& f2, const std::string& f3,
           const std::string& f4) {
  Line l;
  if (!f1.empty()) l.at(2, f1);
  l.at(5, f2).at(15, f3).at(25, f4);
  os << l.str() << '\n';
}

const char* sense_code(Sense s) {
  switch (s) {
    case Sense::le: return "L";
    case Sense::ge: return "G";
    case Sense::eq: return "E";
  }
  return "E";
}

}  // namespace

std::string mps_column_name(std::size_t j) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "X%07zu", j);
  return buf;
}

std::string mps_row_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "R%07zu", i);
  return buf;
}

void write_mps(const MilpModel& model, std::ostream& os, const std::string& name) {
  if (!model.sealed()) throw InvalidInput("model must be sealed before export");
  if (model.num_variables() > 9'999'999 || model.num_rows() > 9'999'999)
    throw InvalidInput("model too large for 8-character MPS names");
  const std::size_t nv = model.num_variables();

  std::vector<std::vector<std::pair<std::size_t, double>>> cols(nv);
  for (std::size_t i = 0; i < model.num_rows(); ++i)
    for (const Term& t : model.row(i).terms) cols[t.var].emplace_back(i, t.coef);

  os << "NAME          " << name.substr(0, 8) << '\n';
  os << "ROWS\n";
  os << " N  OBJ\n";
  for (std::size_t i = 0; i < model.num_rows(); ++i)
    os << ' ' << sense_code(model.row(i).sense) << "  " << mps_row_name(i) << '\n';

  os << "COLUMNS\n";
  bool in_int = false;
  for (std::size_t j = 0; j < nv; ++j) {
    const Variable& v = model.variable(j);
    const bool is_int = v.kind == VarKind::binary;
    if (is_int != in_int) {
      Line l;
      l.at(5, "MARKER").at(15, "'MARKER'").at(40, is_int ? "'INTORG'" : "'INTEND'");
      os << l.str() << '\n';
      in_int = is_int;
    }
    const std::string cname = mps_column_name(j);
    if (v.objective != 0.0 || cols[j].empty()) entry(os, "", cname, "OBJ", number(v.objective));
    for (auto [i, a] : cols[j]) entry(os, "", cname, mps_row_name(i), number(a));
  }
  if (in_int) {
    Line l;
    l.at(5, "MARKER").at(15, "'MARKER'").at(40, "'INTEND'");
    os << l.str() << '\n';
  }

  os << "RHS\n";
  if (model.objective_constant() != 0.0) entry(os, "", "RHS", "OBJ", number(-model.objective_constant()));
  for (std::size_t i = 0; i < model.num_rows(); ++i)
    if (model.row(i).rhs != 0.0) entry(os, "", "RHS", mps_row_name(i), number(model.row(i).rhs));

  os << "BOUNDS\n";
  for (std::size_t j = 0; j < nv; ++j) {
    const Variable& v = model.variable(j);
    const std::string cname = mps_column_name(j);
    if (v.lower == v.upper) {
      entry(os, "FX", "BND", cname, number(v.lower));
      continue;
    }
    if (v.kind == VarKind::binary) {
      entry(os, "BV", "BND", cname, "");
      continue;
    }
    const bool lo_inf = std::isinf(v.lower);
    const bool up_inf = std::isinf(v.upper);
    if (lo_inf && up_inf) {
      entry(os, "FR", "BND", cname, "");
      continue;
    }
    if (lo_inf)
      entry(os, "MI", "BND", cname, "");
    else if (v.lower != 0.0)
      entry(os, "LO", "BND", cname, number(v.lower));
    if (!up_inf) entry(os, "UP", "BND", cname, number(v.upper));
  }

  if (!model.quadratic_objective().empty()) {
    std::map<std::pair<std::size_t, std::size_t>, double> q;
    for (const QuadTerm& t : model.quadratic_objective()) q[{t.i, t.j}] += t.i == t.j ? 2.0 * t.coef : t.coef;
    os << "QUADOBJ\n";
    for (const auto& [ij, c] : q)
      if (c != 0.0) entry(os, "", mps_column_name(ij.first), mps_column_name(ij.second), number(c));
  }
  os << "ENDATA\n";
}

void export_mps(const MilpModel& model, const std::filesystem::path& path, const std::string& name) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  write_mps(model, os, name);
  os.flush();
  if (!os) throw Error("failed writing " + path.string());
}

SolveOutcome solve_external(const MilpModel& model, const ExternalSolver& solver) {
  static std::atomic<unsigned> counter{0};
  const auto t0 = std::chrono::steady_clock::now();
  const std::string stem = "ott_" + std::to_string(::getpid()) + "_" + std::to_string(counter++);
  const std::filesystem::path mps = solver.workdir / (stem + ".mps");
  const std::filesystem::path sol = solver.workdir / (stem + ".sol");
  export_mps(model, mps);

  std::string cmd = solver.command;
  auto replace_all = [&cmd](const std::string& key, const std::string& value) {
    for (std::size_t p = cmd.find(key); p != std::string::npos; p = cmd.find(key, p + value.size()))
      cmd.replace(p, key.size(), value);
  };
  replace_all("{mps}", mps.string());
  replace_all("{sol}", sol.string());
  const int rc = std::system(cmd.c_str());
  if (rc != 0) throw Error("external solver failed with status " + std::to_string(rc) + ": " + cmd);

  std::ifstream in(sol);
  if (!in) throw Error("external solver wrote no solution file " + sol.string());
  SolveOutcome out;
  out.status = SolveStatus::optimal;
  std::vector<double> x(model.num_variables(), 0.0);
  for (std::size_t j = 0; j < x.size(); ++j)
    x[j] = std::isfinite(model.variable(j).lower) ? model.variable(j).lower : 0.0;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string key, value;
    if (!(ls >> key >> value)) continue;
    if (key == "status") {
      if (value == "infeasible") out.status = SolveStatus::infeasible;
      else if (value == "unbounded") out.status = SolveStatus::unbounded;
      else if (value != "optimal") out.status = SolveStatus::gap_limit;
      continue;
    }
    if (key.size() != 8 || key[0] != 'X') continue;
    const std::size_t j = std::stoul(key.substr(1));
    if (j < x.size()) x[j] = std::stod(value);
  }
  std::filesystem::remove(mps);
  std::filesystem::remove(sol);
  if (out.status == SolveStatus::optimal || out.status == SolveStatus::gap_limit) {
    out.objective = model.objective_value(x);
    out.bound = out.status == SolveStatus::optimal ? out.objective : -kInf;
    out.assignment = std::move(x);
  }
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace ott::milp
