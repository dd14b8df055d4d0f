#include "ott/milp/kernels.hpp"

#include <cstdint>

namespace ott::milp::kernels {

namespace {

void scale_pivot_row(Matrix& t, std::size_t r, std::size_t q, std::vector<std::size_t>& nz) {
  const std::size_t n = t.cols();
  double* pr = t.row(r).data();
  const double inv = 1.0 / pr[q];
  nz.clear();
  for (std::size_t j = 0; j < n; ++j) {
    if (pr[j] == 0.0) continue;
    pr[j] *= inv;
    nz.push_back(j);
  }
  pr[q] = 1.0;
}

inline void eliminate_row(double* ri, const double* pr, std::size_t q, std::size_t n,
                          const std::vector<std::size_t>& nz) {
  const double f = ri[q];
  if (f == 0.0) return;
  // A dense sweep vectorizes; the index list only pays off when sparse.
  if (nz.size() * 4 > n) {
    for (std::size_t j = 0; j < n; ++j) ri[j] -= f * pr[j];
  } else {
    for (std::size_t j : nz) ri[j] -= f * pr[j];
  }
  ri[q] = 0.0;
}

}  // namespace

void pivot_serial(Matrix& t, std::size_t r, std::size_t q, std::vector<std::size_t>& nz) {
  scale_pivot_row(t, r, q, nz);
  const double* pr = t.row(r).data();
  for (std::size_t i = 0; i < t.rows(); ++i) {
    if (i == r) continue;
    eliminate_row(t.row(i).data(), pr, q, t.cols(), nz);
  }
}

void pivot_parallel(Matrix& t, std::size_t r, std::size_t q, std::vector<std::size_t>& nz) {
  scale_pivot_row(t, r, q, nz);
  const double* pr = t.row(r).data();
  const auto m = static_cast<std::int64_t>(t.rows());
  const bool big = t.rows() * nz.size() > 200000;
  const std::int64_t ri = static_cast<std::int64_t>(r);
#pragma omp parallel for schedule(static) if (big)
  for (std::int64_t i = 0; i < m; ++i) {
    if (i == ri) continue;
    eliminate_row(t.row(static_cast<std::size_t>(i)).data(), pr, q, t.cols(), nz);
  }
}

}  // namespace ott::milp::kernels
