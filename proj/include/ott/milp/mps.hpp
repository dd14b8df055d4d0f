#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "ott/milp/model.hpp"

namespace ott::milp {

// Generated 8-character names: columns X0000000.., rows R0000000.., and the
// objective row OBJ. Model names stay in the IR only.
std::string mps_column_name(std::size_t j);
std::string mps_row_name(std::size_t i);

// Fixed-format MPS. Binaries sit between INTORG/INTEND markers with BV
// bounds; a nonzero objective constant is written as RHS of the objective row
// with flipped sign (offset = -RHS); quadratic objective terms go to a
// QUADOBJ section (objective = c'x + 1/2 x'Qx, upper triangle).
void write_mps(const MilpModel& model, std::ostream& os, const std::string& name = "OTT");
void export_mps(const MilpModel& model, const std::filesystem::path& path,
                const std::string& name = "OTT");

// Runs an external solver on the exported model. `command` is a shell
// command in which {mps} and {sol} are replaced by the file paths. The
// solver writes `<name> <value>` lines; an optional `status <word>` line
// (optimal/infeasible/unbounded) sets the outcome status.
struct ExternalSolver {
  std::string command;
  std::filesystem::path workdir = std::filesystem::temp_directory_path();
};

SolveOutcome solve_external(const MilpModel& model, const ExternalSolver& solver);

}  // namespace ott::milp
