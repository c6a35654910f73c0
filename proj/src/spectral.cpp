#include "ratgraph/spectral.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "ratgraph/error.hpp"
#include "ratgraph/format.hpp"
#include "ratgraph/kernels.hpp"

namespace ratgraph {
namespace {

// Householder reduction to tridiagonal form (EISPACK tred2 lineage). `w` holds
// the transpose of the accumulated orthogonal factor, so every inner loop runs
// along a contiguous row and goes through the dispatched kernels.
void tridiagonalize(Matrix& w, std::vector<double>& d, std::vector<double>& e) {
  const std::size_t n = w.rows();
  if (n == 0) return;
  for (std::size_t j = 0; j < n; ++j) d[j] = w(j, n - 1);

  for (std::size_t i = n - 1; i > 0; --i) {
    double scale = 0.0;
    double h = 0.0;
    for (std::size_t k = 0; k < i; ++k) scale += std::abs(d[k]);
    if (scale == 0.0) {
      e[i] = d[i - 1];
      for (std::size_t j = 0; j < i; ++j) {
        d[j] = w(j, i - 1);
        w(j, i) = 0.0;
        w(i, j) = 0.0;
      }
    } else {
      for (std::size_t k = 0; k < i; ++k) {
        d[k] /= scale;
        h += d[k] * d[k];
      }
      double f = d[i - 1];
      double g = std::sqrt(h);
      if (f > 0) g = -g;
      e[i] = scale * g;
      h -= f * g;
      d[i - 1] = f - g;
      std::fill(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(i), 0.0);

      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        w(i, j) = f;
        g = e[j] + w(j, j) * f;
        const std::size_t len = i - j - 1;
        if (len > 0) {
          const double* wj = &w(j, j + 1);
          g += kernels::active().dot(wj, &d[j + 1], len);
          kernels::active().axpy(f, wj, &e[j + 1], len);
        }
        e[j] = g;
      }
      f = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        e[j] /= h;
        f += e[j] * d[j];
      }
      const double hh = f / (h + h);
      for (std::size_t j = 0; j < i; ++j) e[j] -= hh * d[j];
      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        g = e[j];
        kernels::active().rank2_update(&w(j, j), f, &e[j], g, &d[j], i - j);
        d[j] = w(j, i - 1);
        w(j, i) = 0.0;
      }
    }
    d[i] = h;
  }

  for (std::size_t i = 0; i + 1 < n; ++i) {
    w(i, n - 1) = w(i, i);
    w(i, i) = 1.0;
    const double h = d[i + 1];
    if (h != 0.0) {
      for (std::size_t k = 0; k <= i; ++k) d[k] = w(i + 1, k) / h;
      const double* vi = &w(i + 1, 0);
      for (std::size_t j = 0; j <= i; ++j) {
        const double g = kernels::active().dot(vi, &w(j, 0), i + 1);
        kernels::active().axpy(-g, d.data(), &w(j, 0), i + 1);
      }
    }
    for (std::size_t k = 0; k <= i; ++k) w(i + 1, k) = 0.0;
  }
  for (std::size_t j = 0; j < n; ++j) {
    d[j] = w(j, n - 1);
    w(j, n - 1) = 0.0;
  }
  w(n - 1, n - 1) = 1.0;
  e[0] = 0.0;
}

// Implicit QL with Wilkinson-style shifts on the tridiagonal (d, e); the
// rotations are applied to pairs of rows of `w`.
void tridiagonal_ql(Matrix& w, std::vector<double>& d, std::vector<double>& e,
                    int max_iterations) {
  const std::size_t n = w.rows();
  if (n == 0) return;
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  const double eps = std::ldexp(1.0, -52);
  double f = 0.0;
  double tst1 = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    std::size_t m = l;
    while (m < n) {
      if (std::abs(e[m]) <= eps * tst1) break;
      ++m;
    }
    if (m > l) {
      int iter = 0;
      do {
        if (++iter > max_iterations)
          throw Error(ErrorCode::kNumericalFailure,
                      "eigensolver did not converge for eigenvalue " + std::to_string(l) +
                          " within " + std::to_string(max_iterations) + " QL iterations");
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        p = d[m];
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (std::size_t i = m; i-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[i];
          h = c * p;
          r = std::hypot(p, e[i]);
          e[i + 1] = s * r;
          s = e[i] / r;
          c = p / r;
          p = c * d[i] - s * g;
          d[i + 1] = h + s * (c * g + s * d[i]);
          kernels::active().rotate(&w(i, 0), &w(i + 1, 0), c, s, n);
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }
}

std::vector<double> read_csv_column(std::istream& in) {
  std::vector<double> out;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(parse_double(line));
  }
  return out;
}

}  // namespace

EigenSystem::EigenSystem(std::vector<double> lambdas, Matrix vectors_by_row)
    : lambdas_(std::move(lambdas)), vectors_(std::move(vectors_by_row)) {
  if (vectors_.rows() != lambdas_.size() || vectors_.cols() != lambdas_.size())
    throw Error(ErrorCode::kInvalidInput, "eigensystem: basis shape does not match spectrum");
}

std::vector<double> EigenSystem::normalized_eigenvalues() const {
  const double top = lambda_max();
  if (!(top > 0.0))
    throw Error(ErrorCode::kInvalidInput,
                "largest eigenvalue is not positive; graph has no edges to normalize by");
  std::vector<double> out(lambdas_.size());
  std::transform(lambdas_.begin(), lambdas_.end(), out.begin(),
                 [top](double l) { return l / top; });
  return out;
}

EigenSystem decompose(const Matrix& a, const DecomposeOptions& options) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw Error(ErrorCode::kInvalidInput, "decompose: matrix not square");
  const double tol = options.symmetry_tol * std::max(1.0, max_abs(a));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(a(i, j) - a(j, i)) > tol)
        throw Error(ErrorCode::kInvalidInput, "decompose: matrix not symmetric at (" +
                                                  std::to_string(i) + ", " + std::to_string(j) +
                                                  ")");

  Matrix w = a;  // symmetric, so this is also its transpose
  std::vector<double> d(n), e(n);
  tridiagonalize(w, d, e);
  tridiagonal_ql(w, d, e, options.max_iterations_per_eigenvalue);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return d[x] < d[y]; });
  std::vector<double> lambdas(n);
  Matrix vectors(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    lambdas[k] = d[order[k]];
    std::copy_n(w.row(order[k]).begin(), n, vectors.row(k).begin());
  }
  return EigenSystem(std::move(lambdas), std::move(vectors));
}

std::vector<double> gft(const EigenSystem& es, std::span<const double> x) {
  if (x.size() != es.size())
    throw Error(ErrorCode::kInvalidInput, "gft: signal length " + std::to_string(x.size()) +
                                              " != " + std::to_string(es.size()));
  return matvec(es.vectors_by_row(), x);
}

std::vector<double> igft(const EigenSystem& es, std::span<const double> x_hat) {
  if (x_hat.size() != es.size())
    throw Error(ErrorCode::kInvalidInput, "igft: spectrum length " +
                                              std::to_string(x_hat.size()) +
                                              " != " + std::to_string(es.size()));
  std::vector<double> x(es.size(), 0.0);
  for (std::size_t k = 0; k < es.size(); ++k)
    if (x_hat[k] != 0.0) kernels::axpy(x_hat[k], es.eigenvector(k), x);
  return x;
}

std::vector<double> apply_spectral_filter(const EigenSystem& es,
                                          const std::function<double(double)>& h,
                                          std::span<const double> x) {
  std::vector<double> coeffs = gft(es, x);
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    const double lambda = es.lambdas()[k];
    const double gain = h(lambda);
    if (!std::isfinite(gain))
      throw Error(ErrorCode::kNumericalFailure,
                  "spectral filter is not finite at eigenvalue " + format_double(lambda));
    coeffs[k] *= gain;
  }
  return igft(es, coeffs);
}

double dirichlet_energy(const Matrix& laplacian, std::span<const double> x) {
  if (x.size() != laplacian.rows())
    throw Error(ErrorCode::kInvalidInput, "dirichlet_energy: length mismatch");
  const std::vector<double> lx = matvec(laplacian, x);
  return kernels::dot(x, lx);
}

void save_eigensystem(const EigenSystem& es, const std::filesystem::path& dir,
                      const std::string& key) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / (key + ".lambdas.csv"));
    if (!out) throw Error(ErrorCode::kIo, "cannot write eigenvalue cache in " + dir.string());
    out << "lambda\n";
    for (double l : es.lambdas()) out << format_double(l) << '\n';
  }
  std::ofstream out(dir / (key + ".vectors.csv"));
  if (!out) throw Error(ErrorCode::kIo, "cannot write eigenvector cache in " + dir.string());
  const std::size_t n = es.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      if (k) out << ',';
      out << format_double(es.u(i, k));
    }
    out << '\n';
  }
}

std::optional<EigenSystem> load_eigensystem(const std::filesystem::path& dir,
                                            const std::string& key) {
  std::ifstream lam_in(dir / (key + ".lambdas.csv"));
  std::ifstream vec_in(dir / (key + ".vectors.csv"));
  if (!lam_in || !vec_in) return std::nullopt;
  std::vector<double> lambdas = read_csv_column(lam_in);
  const std::size_t n = lambdas.size();
  Matrix vectors(n, n);
  std::string line;
  std::size_t i = 0;
  while (std::getline(vec_in, line)) {
    if (line.empty()) continue;
    if (i >= n) throw Error(ErrorCode::kParse, "eigenvector cache has too many rows");
    std::stringstream row(line);
    std::string cell;
    std::size_t k = 0;
    while (std::getline(row, cell, ',')) {
      if (k >= n) throw Error(ErrorCode::kParse, "eigenvector cache row too long");
      vectors(k, i) = parse_double(cell);
      ++k;
    }
    if (k != n) throw Error(ErrorCode::kParse, "eigenvector cache row too short");
    ++i;
  }
  if (i != n) throw Error(ErrorCode::kParse, "eigenvector cache has too few rows");
  return EigenSystem(std::move(lambdas), std::move(vectors));
}

}  // namespace ratgraph
