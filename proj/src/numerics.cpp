#include "dcd/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dcd {

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::hermitian() const {
  ComplexMatrix t(cols_, rows_);
  for (std::size_t j = 0; j < cols_; ++j)
    for (std::size_t i = 0; i < rows_; ++i) t(j, i) = std::conj((*this)(i, j));
  return t;
}

ComplexVector matvec(const ComplexMatrix& a, const ComplexVector& v) {
  if (a.cols() != v.size())
    throw std::invalid_argument("matvec: dimension mismatch");
  ComplexVector y(a.rows(), cf64{0.0, 0.0});
  for (std::size_t j = 0; j < a.cols(); ++j)
    kernels::caxpy(v[j], a.col(j).data(), y.data(), a.rows());
  return y;
}

ComplexVector hermitian_solve(const ComplexMatrix& a, const ComplexVector& b) {
  const std::size_t n = a.rows();
  if (n == 0 || a.cols() != n)
    throw std::invalid_argument("hermitian_solve: matrix must be square and nonempty");
  if (b.size() != n)
    throw std::invalid_argument("hermitian_solve: rhs length mismatch");

  double max_abs = 0.0, max_diag = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    max_diag = std::max(max_diag, std::abs(a(j, j)));
    for (std::size_t i = 0; i < n; ++i) max_abs = std::max(max_abs, std::abs(a(i, j)));
  }
  const double herm_tol = 1e-10 * (1.0 + max_abs);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i <= j; ++i)
      if (std::abs(a(i, j) - std::conj(a(j, i))) > herm_tol)
        throw std::invalid_argument("hermitian_solve: matrix is not hermitian");

  // In-place lower Cholesky on a working copy.
  ComplexMatrix l = a;
  const double pivot_floor = 1e-14 * max_diag;
  for (std::size_t j = 0; j < n; ++j) {
    double d = l(j, j).real();
    for (std::size_t k = 0; k < j; ++k) d -= std::norm(l(j, k));
    if (!(d > pivot_floor))
      throw std::runtime_error("hermitian_solve: matrix is numerically singular");
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      cf64 s = l(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / ljj;
    }
  }

  // L z = b, then L^H x = z.
  ComplexVector x = b;
  for (std::size_t i = 0; i < n; ++i) {
    cf64 s = x[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x[k];
    x[i] = s / l(i, i).real();
  }
  for (std::size_t ii = n; ii-- > 0;) {
    cf64 s = x[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= std::conj(l(k, ii)) * x[k];
    x[ii] = s / l(ii, ii).real();
  }
  return x;
}

cf64 dotc(const ComplexVector& a, const ComplexVector& b) {
  if (a.size() != b.size() || a.empty())
    throw std::invalid_argument("dotc: vectors must be nonempty and equal length");
  return kernels::cdotc(a.data(), b.data(), a.size());
}

double vecnorm2(const ComplexVector& v) {
  if (v.empty()) throw std::invalid_argument("vecnorm2: empty vector");
  return std::sqrt(kernels::norm2sq(v.data(), v.size()));
}

}  // namespace dcd
