#include "ratgraph/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ratgraph/error.hpp"
#include "ratgraph/kernels.hpp"

namespace ratgraph {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

std::vector<double> matvec(const Matrix& a, std::span<const double> x) {
  if (x.size() != a.cols())
    throw Error(ErrorCode::kInvalidInput, "matvec: dimension mismatch");
  std::vector<double> y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = kernels::dot(a.row(i), x);
  return y;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    throw Error(ErrorCode::kInvalidInput, "matmul: dimension mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto ci = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik != 0.0) kernels::axpy(aik, b.row(k), ci);
    }
  }
  return c;
}

double norm2(std::span<const double> x) { return std::sqrt(kernels::dot(x, x)); }

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

LuDecomposition::LuDecomposition(Matrix a, double pivot_tol)
    : lu_(std::move(a)), perm_(lu_.rows()) {
  const std::size_t n = lu_.rows();
  if (lu_.cols() != n) throw Error(ErrorCode::kInvalidInput, "LU: matrix not square");
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});
  min_pivot_ = n == 0 ? 0.0 : INFINITY;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(lu_(i, k)) > std::abs(lu_(p, k))) p = i;
    const double pivot = std::abs(lu_(p, k));
    min_pivot_ = std::min(min_pivot_, pivot);
    if (!(pivot >= pivot_tol))
      throw Error(ErrorCode::kSingularSystem,
                  "singular system: pivot " + std::to_string(pivot) + " at column " +
                      std::to_string(k));
    if (p != k) {
      std::swap_ranges(lu_.row(k).begin(), lu_.row(k).end(), lu_.row(p).begin());
      std::swap(perm_[k], perm_[p]);
    }
    const double inv = 1.0 / lu_(k, k);
    auto rk = lu_.row(k).subspan(k + 1);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = lu_(i, k) * inv;
      lu_(i, k) = f;
      if (f != 0.0) kernels::axpy(-f, rk, lu_.row(i).subspan(k + 1));
    }
  }
}

std::vector<double> LuDecomposition::solve(std::span<const double> b) const {
  const std::size_t n = lu_.rows();
  if (b.size() != n) throw Error(ErrorCode::kInvalidInput, "LU solve: dimension mismatch");
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[perm_[i]];
    for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
    x[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= lu_(i, j) * x[j];
    x[i] = s / lu_(i, i);
  }
  return x;
}

std::vector<double> lu_solve(Matrix a, std::span<const double> b, double pivot_tol) {
  return LuDecomposition(std::move(a), pivot_tol).solve(b);
}

std::vector<double> cholesky_solve(const Matrix& a, std::span<const double> b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n)
    throw Error(ErrorCode::kInvalidInput, "cholesky: dimension mismatch");
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0))
      throw Error(ErrorCode::kSingularSystem,
                  "cholesky: matrix not positive definite at column " + std::to_string(j));
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
    y[i] = s / l(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = y[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= l(k, i) * y[k];
    y[i] = s / l(i, i);
  }
  return y;
}

std::vector<double> qr_least_squares(Matrix a, std::vector<double> b) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (b.size() != m || m < n)
    throw Error(ErrorCode::kInvalidInput, "least squares: bad dimensions");

  // Column-major copy keeps each Householder reflection on contiguous memory.
  Matrix cols = a.transposed();
  double scale = 0.0;
  for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, norm2(cols.row(j)));
  std::vector<double> diag(n);
  for (std::size_t k = 0; k < n; ++k) {
    auto ck = cols.row(k).subspan(k);
    const double alpha = norm2(ck);
    if (!(alpha > 1e-14 * scale))
      throw Error(ErrorCode::kSingularSystem,
                  "least squares: rank deficient at column " + std::to_string(k));
    const double r = ck[0] > 0 ? -alpha : alpha;
    ck[0] -= r;
    const double vnorm2 = kernels::dot(ck, ck);
    for (std::size_t j = k + 1; j < n; ++j) {
      auto cj = cols.row(j).subspan(k);
      kernels::axpy(-2.0 * kernels::dot(ck, cj) / vnorm2, ck, cj);
    }
    std::span<double> bk(b.data() + k, m - k);
    kernels::axpy(-2.0 * kernels::dot(ck, bk) / vnorm2, ck, bk);
    diag[k] = r;
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= cols(j, i) * x[j];
    x[i] = s / diag[i];
  }
  return x;
}

}  // namespace ratgraph
