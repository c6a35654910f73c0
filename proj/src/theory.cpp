#include "ratgraph/theory.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "ratgraph/error.hpp"
#include "ratgraph/filters.hpp"
#include "ratgraph/format.hpp"
#include "ratgraph/parallel.hpp"
#include "ratgraph/remez.hpp"

namespace ratgraph {

void JumpTarget::validate() const {
  if (sigma != 0 && sigma != 1)
    throw Error(ErrorCode::kInvalidParameter, "jump target: sigma must be 0 or 1");
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(shift))
    throw Error(ErrorCode::kInvalidParameter, "jump target: non-finite parameter");
}

double eval_jump(const JumpTarget& j, double x) {
  const double y = x - j.shift;
  if (j.sigma == 0) return j.a * std::abs(y) + j.b * y;
  const double s = (y > 0.0) - (y < 0.0);
  return j.a * s + j.b * y;
}

double newman_approx(std::size_t n, double x) {
  if (n < 5)
    throw Error(ErrorCode::kInvalidParameter,
                "Newman approximant needs n >= 5, got " + std::to_string(n));
  const double ax = std::abs(x);
  if (ax == 0.0) return 0.0;
  const double alpha = std::exp(-1.0 / std::sqrt(static_cast<double>(n)));
  double rho = 1.0;
  double p = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    p *= alpha;
    rho *= (p - ax) / (p + ax);
  }
  return ax * (1.0 - rho) / (1.0 + rho);
}

double newman_scaled(std::size_t n, double c, double x) {
  if (!(c > 0.0)) throw Error(ErrorCode::kInvalidParameter, "Newman scale c must be positive");
  return c * newman_approx(n, x / c);
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t count) {
  if (count < 2 || !(hi > lo))
    throw Error(ErrorCode::kInvalidParameter, "grid needs at least 2 points and lo < hi");
  std::vector<double> g(count);
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) g[i] = lo + step * static_cast<double>(i);
  g.back() = hi;
  return g;
}

double sup_error(const std::function<double(double)>& f, const std::function<double(double)>& g,
                 std::span<const double> grid) {
  double m = 0.0;
  for (double x : grid) m = std::max(m, std::abs(f(x) - g(x)));
  return m;
}

std::string_view to_string(RateKind kind) {
  return kind == RateKind::kRational ? "rational" : "polynomial";
}

RateKind parse_rate_kind(std::string_view name) {
  if (name == "rational") return RateKind::kRational;
  if (name == "polynomial") return RateKind::kPolynomial;
  throw Error(ErrorCode::kInvalidParameter,
              "unknown rate kind '" + std::string(name) + "' (expected rational or polynomial)");
}

std::vector<RatePoint> rate_experiment(RateKind kind, const JumpTarget& target,
                                       std::span<const std::size_t> degrees,
                                       const RateOptions& o) {
  target.validate();
  if (o.grid_size < 10000)
    throw Error(ErrorCode::kInvalidParameter, "rate experiment grid needs at least 10^4 points");
  for (std::size_t d : degrees)
    if (d < 5)
      throw Error(ErrorCode::kInvalidParameter,
                  "rate experiment degrees must be >= 5, got " + std::to_string(d));
  if (kind == RateKind::kRational && target.sigma != 0)
    throw Error(ErrorCode::kInvalidParameter,
                "the Newman construction covers the sigma = 0 family only");

  const std::vector<double> grid = uniform_grid(o.lo, o.hi, o.grid_size);
  auto f = [&](double x) { return eval_jump(target, x); };
  std::vector<RatePoint> out(degrees.size());

  if (kind == RateKind::kRational) {
    const double c = std::max(std::abs(o.lo - target.shift), std::abs(o.hi - target.shift));
    parallel_for(degrees.size(), o.threads, [&](std::size_t i) {
      const std::size_t n = degrees[i];
      auto approx = [&](double x) {
        const double y = x - target.shift;
        return target.a * newman_scaled(n, c, y) + target.b * y;
      };
      out[i] = {n, sup_error(f, approx, grid),
                3.0 * std::abs(target.a) * c * std::exp(-std::sqrt(static_cast<double>(n)))};
    });
    return out;
  }

  // Chebyshev basis on u = (2x - lo - hi) / (hi - lo) in [-1, 1].
  std::vector<double> u(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    u[i] = std::clamp((2.0 * grid[i] - o.lo - o.hi) / (o.hi - o.lo), -1.0, 1.0);
  DiscreteTarget samples;
  samples.ts = u;
  samples.ys.reserve(grid.size());
  for (double x : grid) samples.ys.push_back(f(x));
  parallel_for(degrees.size(), o.threads, [&](std::size_t i) {
    const std::size_t n = degrees[i];
    const MinimaxPolynomial mp = minimax_polynomial(samples, n, PolyBasis::kChebyshev);
    const std::vector<double> values = eval_poly(mp.filter, u);
    double m = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k)
      m = std::max(m, std::abs(samples.ys[k] - values[k]));
    out[i] = {n, m, std::nan("")};
  });
  return out;
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw Error(ErrorCode::kInvalidInput, "line fit needs at least two (x, y) pairs");
  const double count = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= count;
  my /= count;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw Error(ErrorCode::kInvalidInput, "line fit needs two distinct x values");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy == 0.0 ? 1.0 : sxy * sxy / (sxx * syy);
  return fit;
}

void write_rate_csv(std::span<const RatePoint> points, std::ostream& out) {
  out << "degree,sup_error,bound\n";
  for (const auto& p : points)
    out << p.degree << ',' << format_double(p.sup_error) << ',' << format_double(p.bound) << '\n';
}

}  // namespace ratgraph
