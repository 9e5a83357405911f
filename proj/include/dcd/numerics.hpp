/**
 * @file numerics.hpp
 * @brief Dense complex linear algebra used by the detectors and precoders.
 *
 * ComplexMatrix is column-major so that the per-user channel columns the
 * coordinate-descent loops touch are contiguous and can be handed straight
 * to the vector kernels.
 */
#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "dcd/kernels.hpp"

namespace dcd {

using cf64 = std::complex<double>;
using ComplexVector = std::vector<cf64>;

class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}

  static ComplexMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  cf64& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
  const cf64& operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

  /// Contiguous view of column j.
  std::span<cf64> col(std::size_t j) { return {data_.data() + j * rows_, rows_}; }
  std::span<const cf64> col(std::size_t j) const { return {data_.data() + j * rows_, rows_}; }

  std::span<cf64> flat() { return data_; }
  std::span<const cf64> flat() const { return data_; }

  /// Conjugate transpose.
  ComplexMatrix hermitian() const;

  bool same_shape(const ComplexMatrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<cf64> data_;  // column-major
};

/// y = A * v. Accumulates column by column in ascending order, so the result
/// is reproducible for a fixed kernel backend.
ComplexVector matvec(const ComplexMatrix& a, const ComplexVector& v);

/// Solve A x = b for hermitian positive definite A (Cholesky, no pivoting).
/// Throws std::invalid_argument if A is not hermitian within 1e-10 and
/// std::runtime_error if a pivot falls below 1e-14 times the largest
/// diagonal entry.
ComplexVector hermitian_solve(const ComplexMatrix& a, const ComplexVector& b);

/// sum_i conj(a[i]) * b[i]; lengths must match and be nonzero.
cf64 dotc(const ComplexVector& a, const ComplexVector& b);

/// Euclidean norm.
double vecnorm2(const ComplexVector& v);

}  // namespace dcd
