#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "npmoment/errors.hpp"

namespace npmoment {

// Dense row-major matrix. Small enough on purpose: the solver works with
// p x p systems where p is the parameter dimension (single digits), and the
// dataset keeps its covariate block in one of these for contiguous access.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_)
      throw DimensionError("matrix data size does not match rows*cols");
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

  const double* data() const { return data_.data(); }
  double* data() { return data_.data(); }
  const std::vector<double>& storage() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Solves A x = b in place for small dense systems (partial-pivot LU).
// Returns the reciprocal 1-norm condition estimate; throws SingularityError
// below `rcond_floor`.
double solve_linear_system(Matrix a, std::span<const double> b, std::span<double> x,
                           double rcond_floor = 1e-12);

// x = A^{-1} b without the throw-on-singular policy; returns rcond (0 if exactly singular).
double try_solve_linear_system(Matrix a, std::span<const double> b, std::span<double> x);

}  // namespace npmoment
