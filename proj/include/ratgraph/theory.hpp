#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace ratgraph {

// a |y| / y^sigma + b y with y = x - shift. For sigma = 1 the value at y = 0
// is taken as 0.
struct JumpTarget {
  double a = 1.0;
  double b = 0.0;
  int sigma = 0;
  double shift = 0.0;

  // Throws Error(kInvalidParameter) unless sigma is 0 or 1 and all fields are finite.
  void validate() const;
};

double eval_jump(const JumpTarget& j, double x);

// Newman's rational approximant of |x| on [-1, 1]:
//   N(x) = prod_{i=1}^{n-1} (x + alpha^i),  alpha = exp(-1/sqrt(n)),
//   A_n(x) = x (N(x) - N(-x)) / (N(x) + N(-x)).
// Evaluated as x (1 - rho) / (1 + rho) with rho = N(-|x|)/N(|x|), a product of
// factors in [-1, 1], so nothing under- or overflows for large n. A_n is even.
// Throws Error(kInvalidParameter) for n < 5.
double newman_approx(std::size_t n, double x);

// c A_n(x / c), the approximant of |x| on [-c, c].
double newman_scaled(std::size_t n, double c, double x);

// Uniform grid of `count` points covering [lo, hi] inclusive.
std::vector<double> uniform_grid(double lo, double hi, std::size_t count);

double sup_error(const std::function<double(double)>& f, const std::function<double(double)>& g,
                 std::span<const double> grid);

enum class RateKind { kRational, kPolynomial };
std::string_view to_string(RateKind kind);
RateKind parse_rate_kind(std::string_view name);

struct RatePoint {
  std::size_t degree = 0;
  double sup_error = 0.0;
  // Rational path: 3 |a| c exp(-sqrt(n)), the composite Newman bound.
  // Polynomial path: NaN (no bound asserted).
  double bound = 0.0;
};

struct RateOptions {
  double lo = -1.0;
  double hi = 1.0;
  std::size_t grid_size = 100000;
  unsigned threads = 1;
};

// Sup errors on a uniform grid over [lo, hi]. The rational path builds
//   a c A_n((x - shift) / c) + b (x - shift),  c = max |x - shift|,
// and is only defined for sigma = 0. The polynomial path is a discrete
// minimax (Remez, Chebyshev basis on the affinely mapped grid) of each degree.
// Throws Error(kInvalidParameter) for degrees below 5, grids below 10^4 points
// or a rational request on a sigma = 1 target.
std::vector<RatePoint> rate_experiment(RateKind kind, const JumpTarget& target,
                                       std::span<const std::size_t> degrees,
                                       const RateOptions& options = {});

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

// Ordinary least squares y ~ slope x + intercept. Needs at least two distinct x.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

// "degree,sup_error,bound" rows.
void write_rate_csv(std::span<const RatePoint> points, std::ostream& out);

}  // namespace ratgraph
