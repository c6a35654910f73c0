#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "ratgraph/filters.hpp"

namespace ratgraph {

// Target values sampled at sorted abscissae (normalized eigenvalues or a grid).
struct DiscreteTarget {
  std::vector<double> ts;
  std::vector<double> ys;

  static DiscreteTarget sample(std::vector<double> ts, const std::function<double(double)>& f);

  std::size_t size() const { return ts.size(); }
  // Throws Error(kInvalidInput) unless lengths match, ts is non-decreasing and
  // every value is finite.
  void validate() const;
};

enum class RemezStatus { kRunning, kConverged, kRelaxedStop, kSingularSkip, kPoleSkip };
std::string_view to_string(RemezStatus status);

struct RemezIteration {
  std::size_t outer = 0;
  std::size_t inner_iterations = 0;
  bool inner_converged = false;
  bool pole = false;
  double level = 0.0;
  double max_residual = 0.0;
  double residual_min = 0.0;  // min over samples of f - R
  double residual_max = 0.0;  // max over samples of f - R
};

// Working state of one Remez run. psi/phi/level/control points describe the
// last solved iterate; the returned filter is the best iterate seen.
struct RemezState {
  std::vector<std::size_t> control_indices;  // into the deduplicated samples
  std::vector<double> control_points;
  std::vector<double> control_values;
  double level = 0.0;
  std::vector<double> psi;
  std::vector<double> phi;
  std::size_t outer_iter = 0;
  std::size_t inner_iter = 0;  // total linear solves
  bool last_inner_converged = false;
  RemezStatus status = RemezStatus::kRunning;
  double best_max_residual = 0.0;
  std::vector<RemezIteration> trace;
};

struct RemezOptions {
  std::size_t max_outer = 50;
  std::size_t max_inner = 100;
  double inner_tol = 1e-6;        // |E_{r+1} - E_r|
  double converged_slack = 1e-9;  // max residual <= |E| + slack
  double repeat_tol = 1e-9;       // relaxed stop on repeated extreme residuals
  double pivot_tol = 1e-12;
  double pole_guard = kDefaultPoleGuard;
  // Seed each inner loop with the previous outer iteration's level instead of
  // restarting from E = 0.
  bool warm_start_level = true;
  // After the inner_tol agreement, keep iterating with secant steps on E
  // until |E_{r+1} - E_r| <= polish_tol (1 + |E|) or progress stalls.
  bool polish_level = true;
  double polish_tol = 1e-13;
  // Collapse abscissae closer than 1e-12 (repeated eigenvalues) into one sample.
  bool merge_duplicate_abscissae = true;
  // Basis of the numerator columns; the denominator is always monomial.
  PolyBasis numerator_basis = PolyBasis::kMonomial;
};

struct LinearizedSolution {
  std::vector<double> psi;
  std::vector<double> phi;
  double level = 0.0;
};

// One linearized leveling step at m+n+2 control points: solves for
// (psi_0..psi_m, phi_1..phi_n, E_next) from rows
//   sum psi_i x^i + ((-1)^d E_r - y_d) sum phi_j x^j + (-1)^d E_next = y_d.
// Throws Error(kSingularSystem) when a pivot falls below pivot_tol.
LinearizedSolution solve_linearized(std::span<const double> xs, std::span<const double> ys,
                                    std::size_t m, std::size_t n, double level,
                                    double pivot_tol = 1e-12,
                                    PolyBasis numerator_basis = PolyBasis::kMonomial);

struct RemezResult {
  RationalFilter filter;  // best iterate; numerator in options.numerator_basis
  RemezState state;
};

// Relaxed Remez exchange for an (m, n) rational fit. Throws Error(kSingularSystem)
// if the very first leveling step is singular. When no pole-free iterate is
// ever produced the status is kPoleSkip, best_max_residual is infinite and the
// filter is the last (poled) iterate, kept for inspection only.
RemezResult remez_fit(const DiscreteTarget& target, std::size_t m, std::size_t n,
                      const RemezOptions& options = {});

struct OrderCell {
  std::size_t m = 0;
  std::size_t n = 0;
  RemezStatus status = RemezStatus::kRunning;
  double max_residual = 0.0;  // valid for converged / relaxed-stop cells
  std::string message;        // reason for a skip
};

struct TraversalResult {
  RemezResult best;
  std::size_t m = 0;
  std::size_t n = 0;
  std::vector<OrderCell> cells;  // row-major over (m, n)
};

// Runs remez_fit on every (m, n) with m <= m_max, n <= n_max and keeps the one
// with smallest max residual. Residuals within tie_tol of the best count as
// tied; ties go to smaller m + n, then smaller n. Throws Error(kNoFit) when
// every cell is skipped.
TraversalResult traverse_orders(const DiscreteTarget& target, std::size_t m_max,
                                std::size_t n_max, const RemezOptions& options = {},
                                unsigned threads = 1, double tie_tol = 1e-10);

struct MinimaxPolynomial {
  PolynomialFilter filter;
  RemezState state;
};

// Discrete minimax polynomial of the given degree via the same exchange loop
// with an empty denominator.
MinimaxPolynomial minimax_polynomial(const DiscreteTarget& target, std::size_t degree,
                                     PolyBasis basis, const RemezOptions& options = {});

nlohmann::json to_json(const RemezState& state);

}  // namespace ratgraph
