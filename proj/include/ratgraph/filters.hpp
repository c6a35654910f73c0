#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "ratgraph/linalg.hpp"

namespace ratgraph {

inline constexpr double kDefaultPoleGuard = 1e-8;

// R(t) = P(t) / Q(t), P = sum psi[i] t^i, Q = 1 + sum phi[j-1] t^j.
// The constant denominator term is fixed at 1 and not stored.
struct RationalFilter {
  std::vector<double> psi{0.0};
  std::vector<double> phi;

  std::size_t numerator_degree() const { return psi.empty() ? 0 : psi.size() - 1; }
  std::size_t denominator_degree() const { return phi.size(); }
  // {1, phi...}
  std::vector<double> denominator_coeffs() const;

  friend bool operator==(const RationalFilter&, const RationalFilter&) = default;
};

enum class PolyBasis { kMonomial, kChebyshev };
std::string_view to_string(PolyBasis basis);
PolyBasis parse_poly_basis(std::string_view name);

struct PolynomialFilter {
  std::vector<double> theta;
  PolyBasis basis = PolyBasis::kMonomial;

  friend bool operator==(const PolynomialFilter&, const PolynomialFilter&) = default;
};

// Throws Error(kPole) naming t when |Q(t)| < pole_guard.
double eval_rational(const RationalFilter& f, double t, double pole_guard = kDefaultPoleGuard);
std::vector<double> eval_rational(const RationalFilter& f, std::span<const double> t,
                                  double pole_guard = kDefaultPoleGuard);

// P and Q at every t without any pole check.
void eval_rational_parts(const RationalFilter& f, std::span<const double> t,
                         std::span<double> p, std::span<double> q);

// Horner for monomial, Clenshaw for Chebyshev. Chebyshev input must lie in
// [-1 - 1e-12, 1 + 1e-12]; otherwise Error(kInvalidInput).
double eval_poly(const PolynomialFilter& f, double t);
std::vector<double> eval_poly(const PolynomialFilter& f, std::span<const double> t);

// P(L~) Q(L~)^{-1} x with L~ = L / lambda_max, computed through a dense LU
// solve of Q(L~) z = x. Throws Error(kPole) when the solve fails or its
// residual exceeds 1e-6 ||x||.
std::vector<double> apply_rational_vertex(const RationalFilter& f, const Matrix& laplacian,
                                          double lambda_max, std::span<const double> x);

enum class LeastSquaresSolver { kQr, kNormalEquations };

// Least-squares polynomial in the given basis. kNormalEquations solves the
// Gram system with 1e-12 added to its diagonal; kQr factors the design matrix
// directly. Throws Error(kSingularSystem) on rank deficiency.
PolynomialFilter fit_poly_least_squares(std::span<const double> ts, std::span<const double> ys,
                                        std::size_t degree, PolyBasis basis,
                                        LeastSquaresSolver solver = LeastSquaresSolver::kQr);

// Exact change of basis for the same polynomial in the same variable.
PolynomialFilter to_monomial(const PolynomialFilter& f);
PolynomialFilter to_chebyshev(const PolynomialFilter& f);

nlohmann::json to_json(const RationalFilter& f);
nlohmann::json to_json(const PolynomialFilter& f);
RationalFilter rational_from_json(const nlohmann::json& j);
PolynomialFilter polynomial_from_json(const nlohmann::json& j);

}  // namespace ratgraph
