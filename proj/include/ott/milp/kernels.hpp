#pragma once

#include <cstddef>
#include <vector>

#include "ott/linalg.hpp"

namespace ott::milp::kernels {

// Gauss-Jordan pivot of a dense tableau on element (r, q): row r is scaled to
// make t(r, q) = 1 and eliminated from every other row. `nz` receives the
// nonzero column pattern of the pivot row and is reused between calls.
void pivot_serial(Matrix& t, std::size_t r, std::size_t q, std::vector<std::size_t>& nz);

// Same result as pivot_serial; rows are distributed over OpenMP threads when
// the tableau is large enough to pay for the fork.
void pivot_parallel(Matrix& t, std::size_t r, std::size_t q, std::vector<std::size_t>& nz);

}  // namespace ott::milp::kernels
