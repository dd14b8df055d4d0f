#include "ott/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

namespace ott {

std::optional<LuFactorization> LuFactorization::factor(Matrix a, double pivot_threshold) {
  const std::size_t n = a.rows();
  LuFactorization f;
  f.perm_.resize(n);
  std::iota(f.perm_.begin(), f.perm_.end(), std::size_t{0});
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(a(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (best < pivot_threshold) return std::nullopt;
    if (p != k) {
      auto rk = a.row(k);
      auto rp = a.row(p);
      std::swap_ranges(rk.begin(), rk.end(), rp.begin());
      std::swap(f.perm_[k], f.perm_[p]);
    }
    const double pivot = a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = a(i, k) / pivot;
      if (m == 0.0) continue;
      a(i, k) = m;
      double* ri = a.row(i).data();
      const double* rk = a.row(k).data();
      for (std::size_t j = k + 1; j < n; ++j) ri[j] -= m * rk[j];
    }
  }
  f.lu_ = std::move(a);
  return f;
}

void LuFactorization::solve_in_place(std::span<double> x) const {
  const std::size_t n = lu_.rows();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = x[perm_[i]];
  for (std::size_t i = 0; i < n; ++i) {
    double s = y[i];
    const double* ri = lu_.row(i).data();
    for (std::size_t j = 0; j < i; ++j) s -= ri[j] * y[j];
    y[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = y[i];
    const double* ri = lu_.row(i).data();
    for (std::size_t j = i + 1; j < n; ++j) s -= ri[j] * y[j];
    y[i] = s / ri[i];
  }
  std::copy(y.begin(), y.end(), x.begin());
}

std::vector<double> LuFactorization::solve(std::span<const double> rhs) const {
  std::vector<double> x(rhs.begin(), rhs.end());
  solve_in_place(x);
  return x;
}

Matrix LuFactorization::inverse() const {
  const std::size_t n = lu_.rows();
  Matrix inv(n, n);
  std::vector<double> col(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(col.begin(), col.end(), 0.0);
    col[j] = 1.0;
    solve_in_place(col);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return inv;
}

}  // namespace ott
