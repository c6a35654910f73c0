#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ratgraph/linalg.hpp"

namespace ratgraph {

// Eigenpairs of a symmetric matrix, eigenvalues ascending. Eigenvectors are
// stored one per row, so eigenvector(k) is the k-th column of the usual U.
class EigenSystem {
 public:
  EigenSystem() = default;
  EigenSystem(std::vector<double> lambdas, Matrix vectors_by_row);

  std::size_t size() const noexcept { return lambdas_.size(); }
  std::span<const double> lambdas() const noexcept { return lambdas_; }
  double lambda_max() const { return lambdas_.empty() ? 0.0 : lambdas_.back(); }

  std::span<const double> eigenvector(std::size_t k) const { return vectors_.row(k); }
  // U(i, k): component i of eigenvector k.
  double u(std::size_t i, std::size_t k) const { return vectors_(k, i); }
  const Matrix& vectors_by_row() const noexcept { return vectors_; }

  // lambda / lambda_max. Throws Error(kInvalidInput) when lambda_max <= 0
  // (an edgeless graph has nothing to normalize by).
  std::vector<double> normalized_eigenvalues() const;

 private:
  std::vector<double> lambdas_;
  Matrix vectors_;
};

struct DecomposeOptions {
  double symmetry_tol = 1e-10;
  int max_iterations_per_eigenvalue = 100;
};

// Householder tridiagonalization followed by implicit QL with shifts.
// Throws Error(kInvalidInput) for asymmetric input and
// Error(kNumericalFailure) if QL exceeds its iteration budget.
EigenSystem decompose(const Matrix& symmetric, const DecomposeOptions& options = {});

// x_hat = U^T x
std::vector<double> gft(const EigenSystem& es, std::span<const double> x);
// x = U x_hat
std::vector<double> igft(const EigenSystem& es, std::span<const double> x_hat);

// U diag(h(lambda_i)) U^T x, with h evaluated on raw (unnormalized) eigenvalues.
std::vector<double> apply_spectral_filter(const EigenSystem& es,
                                          const std::function<double(double)>& h,
                                          std::span<const double> x);

// x^T L x
double dirichlet_energy(const Matrix& laplacian, std::span<const double> x);

// CSV cache: <dir>/<key>.lambdas.csv holds one eigenvalue per line,
// <dir>/<key>.vectors.csv holds U row by row. Values use 17 significant digits,
// so a load reproduces the saved doubles exactly.
void save_eigensystem(const EigenSystem& es, const std::filesystem::path& dir,
                      const std::string& key);
std::optional<EigenSystem> load_eigensystem(const std::filesystem::path& dir,
                                            const std::string& key);

}  // namespace ratgraph
