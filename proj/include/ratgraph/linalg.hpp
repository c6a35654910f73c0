#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ratgraph {

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  Matrix transposed() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

std::vector<double> matvec(const Matrix& a, std::span<const double> x);
Matrix matmul(const Matrix& a, const Matrix& b);

double norm2(std::span<const double> x);
double max_abs(const Matrix& a);

// Dense LU with partial pivoting. Throws Error(kSingularSystem) if any pivot
// magnitude falls below `pivot_tol`.
class LuDecomposition {
 public:
  LuDecomposition(Matrix a, double pivot_tol);

  std::vector<double> solve(std::span<const double> b) const;
  double min_abs_pivot() const noexcept { return min_pivot_; }

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
  double min_pivot_ = 0.0;
};

std::vector<double> lu_solve(Matrix a, std::span<const double> b, double pivot_tol);

// Solves the SPD system a x = b by Cholesky. Throws Error(kSingularSystem)
// when a non-positive pivot shows up.
std::vector<double> cholesky_solve(const Matrix& a, std::span<const double> b);

// argmin_x ||a x - b||_2 by Householder QR; a must have rows >= cols.
// Throws Error(kSingularSystem) if a column is numerically dependent.
std::vector<double> qr_least_squares(Matrix a, std::vector<double> b);

}  // namespace ratgraph
