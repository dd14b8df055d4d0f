#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace ott {

// Row-major dense matrix. Only what the DC flow and LP layers need.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// LU factorization with partial pivoting, PA = LU, stored in place.
class LuFactorization {
 public:
  // Returns nullopt when some pivot magnitude falls below `pivot_threshold`
  // (numerically singular).
  static std::optional<LuFactorization> factor(Matrix a, double pivot_threshold);

  std::size_t size() const { return lu_.rows(); }

  // Solves A x = rhs.
  std::vector<double> solve(std::span<const double> rhs) const;

  // Solves A x = rhs in place.
  void solve_in_place(std::span<double> x) const;

  // Explicit inverse, column by column from the factors.
  Matrix inverse() const;

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
};

}  // namespace ott
