#include "ratgraph/filters.hpp"

#include <cmath>
#include <string>

#include "ratgraph/error.hpp"
#include "ratgraph/format.hpp"
#include "ratgraph/kernels.hpp"

namespace ratgraph {
namespace {

double horner(std::span<const double> c, double t) {
  double acc = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * t + c[k];
  return acc;
}

double clenshaw(std::span<const double> c, double x) {
  if (!(x >= -1.0 - 1e-12 && x <= 1.0 + 1e-12))
    throw Error(ErrorCode::kInvalidInput,
                "Chebyshev evaluation outside [-1, 1]: x = " + format_double(x));
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) {
    const double b0 = 2.0 * x * b1 - b2 + c[k];
    b2 = b1;
    b1 = b0;
  }
  return c.empty() ? 0.0 : x * b1 - b2 + c[0];
}

std::vector<double> basis_row(double t, std::size_t degree, PolyBasis basis) {
  std::vector<double> row(degree + 1);
  row[0] = 1.0;
  if (degree == 0) return row;
  row[1] = t;
  for (std::size_t k = 2; k <= degree; ++k)
    row[k] = basis == PolyBasis::kMonomial ? row[k - 1] * t : 2.0 * t * row[k - 1] - row[k - 2];
  return row;
}

void check_coeffs(std::span<const double> c, const char* what) {
  for (double v : c)
    if (!std::isfinite(v))
      throw Error(ErrorCode::kInvalidInput, std::string(what) + " has a non-finite coefficient");
}

std::vector<double> json_vector(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array())
    throw Error(ErrorCode::kParse, std::string("filter JSON lacks array '") + key + "'");
  std::vector<double> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number()) throw Error(ErrorCode::kParse, std::string("non-numeric entry in ") + key);
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

std::vector<double> RationalFilter::denominator_coeffs() const {
  std::vector<double> q;
  q.reserve(phi.size() + 1);
  q.push_back(1.0);
  q.insert(q.end(), phi.begin(), phi.end());
  return q;
}

std::string_view to_string(PolyBasis basis) {
  return basis == PolyBasis::kMonomial ? "monomial" : "chebyshev";
}

PolyBasis parse_poly_basis(std::string_view name) {
  if (name == "monomial") return PolyBasis::kMonomial;
  if (name == "chebyshev") return PolyBasis::kChebyshev;
  throw Error(ErrorCode::kParse, "unknown polynomial basis '" + std::string(name) + "'");
}

double eval_rational(const RationalFilter& f, double t, double pole_guard) {
  const double q = horner(f.denominator_coeffs(), t);
  if (!(std::abs(q) >= pole_guard))
    throw Error(ErrorCode::kPole, "denominator vanishes at t = " + format_double(t) +
                                      " (|Q| = " + format_double(std::abs(q)) + ")");
  return horner(f.psi, t) / q;
}

void eval_rational_parts(const RationalFilter& f, std::span<const double> t,
                         std::span<double> p, std::span<double> q) {
  kernels::horner(f.psi, t, p);
  const auto qc = f.denominator_coeffs();
  kernels::horner(qc, t, q);
}

std::vector<double> eval_rational(const RationalFilter& f, std::span<const double> t,
                                  double pole_guard) {
  std::vector<double> p(t.size()), q(t.size());
  eval_rational_parts(f, t, p, q);
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(std::abs(q[i]) >= pole_guard))
      throw Error(ErrorCode::kPole, "denominator vanishes at t = " + format_double(t[i]) +
                                        " (|Q| = " + format_double(std::abs(q[i])) + ")");
    p[i] /= q[i];
  }
  return p;
}

double eval_poly(const PolynomialFilter& f, double t) {
  return f.basis == PolyBasis::kMonomial ? horner(f.theta, t) : clenshaw(f.theta, t);
}

std::vector<double> eval_poly(const PolynomialFilter& f, std::span<const double> t) {
  std::vector<double> out(t.size());
  if (f.basis == PolyBasis::kMonomial) {
    kernels::horner(f.theta, t, out);
  } else {
    for (std::size_t i = 0; i < t.size(); ++i) out[i] = clenshaw(f.theta, t[i]);
  }
  return out;
}

std::vector<double> apply_rational_vertex(const RationalFilter& f, const Matrix& laplacian,
                                          double lambda_max, std::span<const double> x) {
  const std::size_t n = laplacian.rows();
  if (laplacian.cols() != n || x.size() != n)
    throw Error(ErrorCode::kInvalidInput, "apply_rational_vertex: dimension mismatch");
  if (!(lambda_max > 0.0))
    throw Error(ErrorCode::kInvalidParameter, "apply_rational_vertex: lambda_max must be > 0");
  check_coeffs(f.psi, "numerator");
  check_coeffs(f.phi, "denominator");

  Matrix lt = laplacian;
  for (double& v : lt.data()) v /= lambda_max;

  // Q(L~) by Horner on matrices.
  const auto qc = f.denominator_coeffs();
  Matrix q(n, n);
  for (std::size_t i = 0; i < n; ++i) q(i, i) = qc.back();
  for (std::size_t k = qc.size() - 1; k-- > 0;) {
    q = matmul(q, lt);
    for (std::size_t i = 0; i < n; ++i) q(i, i) += qc[k];
  }

  std::vector<double> z;
  try {
    z = lu_solve(q, x, 1e-300);
  } catch (const Error& e) {
    throw Error(ErrorCode::kPole, std::string("Q(L~) is singular: ") + e.what());
  }
  std::vector<double> r = matvec(q, z);
  for (std::size_t i = 0; i < n; ++i) r[i] -= x[i];
  if (!(norm2(r) <= 1e-6 * norm2(x)))
    throw Error(ErrorCode::kPole, "Q(L~) solve residual " + format_double(norm2(r)) +
                                      " exceeds 1e-6 ||x||; denominator near a pole");

  std::vector<double> y(n, 0.0);
  for (std::size_t k = f.psi.size(); k-- > 0;) {
    if (k + 1 < f.psi.size()) y = matvec(lt, y);
    kernels::axpy(f.psi[k], z, y);
  }
  return y;
}

PolynomialFilter fit_poly_least_squares(std::span<const double> ts, std::span<const double> ys,
                                        std::size_t degree, PolyBasis basis,
                                        LeastSquaresSolver solver) {
  if (ts.size() != ys.size())
    throw Error(ErrorCode::kInvalidInput, "fit_poly_least_squares: length mismatch");
  if (ts.size() < degree + 1)
    throw Error(ErrorCode::kInvalidInput, "fit_poly_least_squares: need at least " +
                                              std::to_string(degree + 1) + " samples");
  const std::size_t cols = degree + 1;
  Matrix design(ts.size(), cols);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (basis == PolyBasis::kChebyshev) clenshaw({}, ts[i]);  // range check only
    const auto row = basis_row(ts[i], degree, basis);
    std::copy(row.begin(), row.end(), design.row(i).begin());
  }
  PolynomialFilter out{.theta = {}, .basis = basis};
  if (solver == LeastSquaresSolver::kQr) {
    out.theta = qr_least_squares(std::move(design), std::vector<double>(ys.begin(), ys.end()));
  } else {
    const Matrix dt = design.transposed();
    Matrix gram = matmul(dt, design);
    for (std::size_t k = 0; k < cols; ++k) gram(k, k) += 1e-12;
    out.theta = cholesky_solve(gram, matvec(dt, ys));
  }
  return out;
}

PolynomialFilter to_monomial(const PolynomialFilter& f) {
  if (f.basis == PolyBasis::kMonomial) return f;
  const std::size_t n = f.theta.size();
  std::vector<double> out(n, 0.0);
  // Monomial coefficients of T_k, built with T_{k+1} = 2x T_k - T_{k-1}.
  std::vector<double> prev(n, 0.0), cur(n, 0.0);
  if (n > 0) prev[0] = 1.0;
  if (n > 1) cur[1] = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::vector<double>& tk = k == 0 ? prev : cur;
    for (std::size_t i = 0; i < n; ++i) out[i] += f.theta[k] * tk[i];
    if (k >= 1 && k + 1 < n) {
      std::vector<double> next(n, 0.0);
      for (std::size_t i = 0; i + 1 < n; ++i) next[i + 1] = 2.0 * cur[i];
      for (std::size_t i = 0; i < n; ++i) next[i] -= prev[i];
      prev = std::move(cur);
      cur = std::move(next);
    }
  }
  return {.theta = out, .basis = PolyBasis::kMonomial};
}

PolynomialFilter to_chebyshev(const PolynomialFilter& f) {
  if (f.basis == PolyBasis::kChebyshev) return f;
  const std::size_t n = f.theta.size();
  // Horner in Chebyshev arithmetic, using x T_0 = T_1 and
  // x T_k = (T_{k+1} + T_{k-1}) / 2.
  std::vector<double> acc(n, 0.0);
  for (std::size_t k = n; k-- > 0;) {
    std::vector<double> shifted(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (acc[j] == 0.0) continue;
      if (j == 0) {
        if (n > 1) shifted[1] += acc[0];
      } else {
        if (j + 1 < n) shifted[j + 1] += 0.5 * acc[j];
        shifted[j - 1] += 0.5 * acc[j];
      }
    }
    shifted[0] += f.theta[k];
    acc = std::move(shifted);
  }
  return {.theta = acc, .basis = PolyBasis::kChebyshev};
}

nlohmann::json to_json(const RationalFilter& f) {
  return {{"psi", f.psi}, {"phi", f.phi}};
}

nlohmann::json to_json(const PolynomialFilter& f) {
  return {{"theta", f.theta}, {"basis", std::string(to_string(f.basis))}};
}

RationalFilter rational_from_json(const nlohmann::json& j) {
  RationalFilter f;
  f.psi = json_vector(j, "psi");
  f.phi = json_vector(j, "phi");
  if (f.psi.empty()) throw Error(ErrorCode::kParse, "psi must hold at least one coefficient");
  return f;
}

PolynomialFilter polynomial_from_json(const nlohmann::json& j) {
  PolynomialFilter f;
  f.theta = json_vector(j, "theta");
  if (!j.contains("basis") || !j.at("basis").is_string())
    throw Error(ErrorCode::kParse, "polynomial JSON lacks 'basis'");
  f.basis = parse_poly_basis(j.at("basis").get<std::string>());
  return f;
}

}  // namespace ratgraph
