#include <cmath>
#include <random>

#include "doctest.h"
#include "ratgraph/error.hpp"
#include "ratgraph/graph.hpp"
#include "ratgraph/remez.hpp"
#include "ratgraph/spectral.hpp"
#include "support.hpp"

using namespace ratgraph;

namespace {

std::vector<double> grid(std::size_t count, double lo = 0.0, double hi = 1.0) {
  std::vector<double> t(count);
  for (std::size_t i = 0; i < count; ++i)
    t[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  return t;
}

double sign(double x) { return (x > 0) - (x < 0); }

double max_residual(const RationalFilter& f, const DiscreteTarget& target) {
  double mx = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i)
    mx = std::max(mx, std::abs(target.ys[i] - eval_rational(f, target.ts[i])));
  return mx;
}

// Residuals y - R at the control points of the last iterate.
std::vector<double> control_residuals(const RemezState& st) {
  RationalFilter f{st.psi, st.phi};
  std::vector<double> r;
  for (std::size_t d = 0; d < st.control_points.size(); ++d)
    r.push_back(st.control_values[d] - eval_rational(f, st.control_points[d]));
  return r;
}

// Brute-force discrete minimax for (a + b t) / (1 + c t). For fixed c the
// error is convex in (a, b), so nested ternary searches find its minimum; c
// is scanned on a grid and then refined by golden-section steps.
double brute_force_minimax_11(const DiscreteTarget& target) {
  auto err = [&](double a, double b, double c) {
    double mx = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) {
      const double t = target.ts[i];
      mx = std::max(mx, std::abs(target.ys[i] - (a + b * t) / (1.0 + c * t)));
    }
    return mx;
  };
  auto ternary = [](auto&& f, double lo, double hi) {
    for (int it = 0; it < 80; ++it) {
      const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
      if (f(m1) < f(m2)) hi = m2;
      else lo = m1;
    }
    return 0.5 * (lo + hi);
  };
  auto best_for_c = [&](double c) {
    auto over_b = [&](double b) {
      const double a = ternary([&](double a) { return err(a, b, c); }, -10.0, 10.0);
      return err(a, b, c);
    };
    const double b = ternary(over_b, -20.0, 20.0);
    return over_b(b);
  };
  double best_c = 0.0, best = INFINITY;
  for (int i = 0; i <= 40; ++i) {
    const double c = -0.95 + 0.1 * i;
    const double e = best_for_c(c);
    if (e < best) {
      best = e;
      best_c = c;
    }
  }
  double lo = best_c - 0.1, hi = best_c + 0.1;
  for (int it = 0; it < 30; ++it) {
    const double m1 = lo + 0.382 * (hi - lo), m2 = hi - 0.382 * (hi - lo);
    if (best_for_c(m1) < best_for_c(m2)) hi = m2;
    else lo = m1;
  }
  return std::min(best, best_for_c(0.5 * (lo + hi)));
}

DiscreteTarget eigenvalue_target(std::uint64_t seed, const std::function<double(double)>& f) {
  Graph g = generate_block_graph({.num_groups = 5, .group_size = 100, .seed = seed});
  auto es = decompose(build_laplacian(g));
  return DiscreteTarget::sample(es.normalized_eigenvalues(), f);
}

}  // namespace

TEST_CASE("leveling step on exactly representable data") {
  // 1 - 2x + 0.5x^2 at m + 2 = 4 points with m = 2, n = 0.
  std::vector<double> xs{0.0, 0.3, 0.7, 1.0};
  std::vector<double> ys;
  for (double x : xs) ys.push_back(1.0 - 2.0 * x + 0.5 * x * x);
  auto sol = solve_linearized(xs, ys, 2, 0, 0.0);
  CHECK(std::abs(sol.level) <= 1e-9);
  CHECK(testing_support::max_abs_diff(sol.psi, {1.0, -2.0, 0.5}) <= 1e-12);
  CHECK(sol.phi.empty());
}

TEST_CASE("leveling step for a constant fit at two points") {
  auto f = [](double x) { return std::abs(x - 0.5); };
  std::vector<double> xs{0.0, 1.0}, ys{f(0.0), f(1.0)};
  auto sol = solve_linearized(xs, ys, 0, 0, 0.0);
  CHECK(sol.psi[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(sol.level) <= 1e-15);
  // Against the interior the constant 0.5 overshoots: residual at 0.5 is -0.5.
  CHECK(f(0.5) - sol.psi[0] < 0.0);
}

TEST_CASE("leveling system size and singular pivots") {
  CHECK_THROWS_AS(solve_linearized(std::vector<double>{0, 1}, std::vector<double>{0, 1}, 1, 0, 0),
                  Error);
  try {
    solve_linearized(std::vector<double>{0.2, 0.7, 0.2}, std::vector<double>{1, 2, 1}, 1, 0, 0.0);
    FAIL("expected singular system");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSingularSystem);
  }
}

TEST_CASE("sign target with (1,1) agrees with a brute-force minimax") {
  auto target = DiscreteTarget::sample(grid(500), [](double x) { return sign(x - 0.5); });
  std::vector<std::size_t> idx{0, 166, 333, 499};
  std::vector<double> xs, ys;
  for (auto i : idx) {
    xs.push_back(target.ts[i]);
    ys.push_back(target.ys[i]);
  }
  auto step = solve_linearized(xs, ys, 1, 1, 0.0);
  CHECK(std::isfinite(step.level));

  auto fit = remez_fit(target, 1, 1);
  const double oracle = brute_force_minimax_11(target);
  CAPTURE(oracle);
  CAPTURE(fit.state.best_max_residual);
  CHECK(std::abs(fit.state.best_max_residual - oracle) <= 0.1 * oracle);
  CHECK(std::abs(std::abs(fit.state.level) - oracle) <= 0.1 * oracle);
}

TEST_CASE("exactly representable rational target") {
  auto target = DiscreteTarget::sample(grid(200), [](double x) { return 1.0 / (1.0 + x); });
  auto fit = remez_fit(target, 0, 1);
  CHECK(fit.filter.psi[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(fit.filter.phi[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(fit.state.best_max_residual <= 1e-6);
  CHECK(fit.state.status == RemezStatus::kConverged);
}

TEST_CASE("rational minimax beats the degree-10 least-squares polynomial on |x - 0.5|") {
  auto target = DiscreteTarget::sample(grid(500), [](double x) { return std::abs(x - 0.5); });
  // The (5, 5) cell itself is degenerate on this symmetric grid (see the
  // pole-skip case below), so the lattice up to (5, 5) is what gets compared.
  auto fit = traverse_orders(target, 5, 5).best;
  auto poly = fit_poly_least_squares(target.ts, target.ys, 10, PolyBasis::kMonomial);
  double poly_max = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i)
    poly_max = std::max(poly_max, std::abs(target.ys[i] - eval_poly(poly, target.ts[i])));
  CAPTURE(poly_max);
  CHECK(fit.state.best_max_residual < poly_max);
  CHECK(max_residual(fit.filter, target) == doctest::Approx(fit.state.best_max_residual));
}

TEST_CASE("equioscillation and level bound properties") {
  std::vector<std::function<double(double)>> targets{
      [](double x) { return std::abs(x - 0.5); },
      [](double x) { return sign(x - 0.5); },
      [](double x) { return std::exp(-3.0 * x) * std::cos(4.0 * x); },
      [](double x) { return x < 0.3 ? 0.0 : 1.0; },
  };
  for (std::size_t ti = 0; ti < targets.size(); ++ti) {
    auto target = DiscreteTarget::sample(grid(500), targets[ti]);
    for (std::size_t m = 0; m <= 4; ++m) {
      for (std::size_t n = 0; n <= 3; ++n) {
        CAPTURE(ti);
        CAPTURE(m);
        CAPTURE(n);
        RemezResult fit;
        try {
          fit = remez_fit(target, m, n);
        } catch (const Error&) {
          continue;  // singular cells have nothing to check
        }
        const auto& st = fit.state;
        CHECK(st.control_points.size() == m + n + 2);
        for (std::size_t d = 1; d < st.control_points.size(); ++d)
          CHECK(st.control_points[d] > st.control_points[d - 1]);
        if (st.last_inner_converged && !st.trace.back().pole) {
          auto r = control_residuals(st);
          const double tol = 1e-6 * (1.0 + std::abs(st.level));
          for (std::size_t d = 0; d < r.size(); ++d) {
            CHECK(std::abs(std::abs(r[d]) - std::abs(st.level)) <= tol);
            if (d > 0 && std::abs(st.level) > tol) CHECK(r[d] * r[d - 1] < 0.0);
          }
        }
        for (const auto& it : st.trace)
          if (!it.pole) CHECK(std::abs(it.level) <= it.max_residual + 1e-6);
        // Best-so-far never exceeds any recorded iterate.
        for (const auto& it : st.trace)
          if (!it.pole) CHECK(st.best_max_residual <= it.max_residual);
        if (st.status == RemezStatus::kPoleSkip) CHECK(std::isinf(st.best_max_residual));
      }
    }
  }
}

TEST_CASE("even target on a symmetric grid: (3, 3) levels but every iterate has a pole") {
  // |x - 0.5| is even about the grid midpoint, so its best (3, 3) approximant
  // is of lower type and the 8-point leveled interpolants carry a real pole.
  auto target = DiscreteTarget::sample(grid(500), [](double x) { return std::abs(x - 0.5); });
  auto fit = remez_fit(target, 3, 3);
  CHECK(fit.state.status == RemezStatus::kPoleSkip);
  REQUIRE(fit.state.last_inner_converged);
  auto r = control_residuals(fit.state);
  for (std::size_t d = 0; d < r.size(); ++d) {
    CHECK(std::abs(std::abs(r[d]) - std::abs(fit.state.level)) <=
          1e-6 * (1.0 + std::abs(fit.state.level)));
    if (d > 0) CHECK(r[d] * r[d - 1] < 0.0);
  }
  auto tr = traverse_orders(target, 3, 3);
  CHECK(tr.cells[3 * 4 + 3].status == RemezStatus::kPoleSkip);
  CHECK(std::isfinite(tr.best.state.best_max_residual));
}

TEST_CASE("remez is deterministic") {
  auto target = eigenvalue_target(3, [](double x) { return sign(x - 0.5); });
  auto a = remez_fit(target, 4, 3);
  auto b = remez_fit(target, 4, 3);
  CHECK(a.filter == b.filter);
  CHECK(to_json(a.state).dump() == to_json(b.state).dump());
}

TEST_CASE("cold-start leveling remains available") {
  auto target = DiscreteTarget::sample(grid(300), [](double x) { return std::abs(x - 0.5); });
  RemezOptions cold;
  cold.warm_start_level = false;
  auto fit = remez_fit(target, 2, 2, cold);
  auto warm = remez_fit(target, 2, 2);
  CHECK(fit.state.best_max_residual < 0.05);
  CHECK(fit.state.best_max_residual == doctest::Approx(warm.state.best_max_residual).epsilon(1e-6));
}

TEST_CASE("order traversal") {
  SUBCASE("representable target selects a low order") {
    auto target = DiscreteTarget::sample(grid(100), [](double x) { return 0.5 - x + 2 * x * x; });
    auto tr = traverse_orders(target, 3, 2);
    CHECK(tr.best.state.best_max_residual <= 1e-6);
    CHECK(tr.m + tr.n <= 2);
    CHECK(tr.cells.size() == 12);
  }
  SUBCASE("rational lattice beats the polynomial row on sign") {
    auto target = eigenvalue_target(1, [](double x) { return sign(x - 0.5); });
    auto tr = traverse_orders(target, 6, 6, {}, 2);
    double poly_best = INFINITY;
    for (const auto& c : tr.cells)
      if (c.n == 0 && (c.status == RemezStatus::kConverged ||
                       c.status == RemezStatus::kRelaxedStop))
        poly_best = std::min(poly_best, c.max_residual);
    CAPTURE(poly_best);
    CHECK(tr.best.state.best_max_residual < poly_best);
  }
  SUBCASE("threaded traversal matches serial") {
    auto target = eigenvalue_target(2, [](double x) { return std::abs(x - 0.5); });
    auto serial = traverse_orders(target, 4, 4, {}, 1);
    auto threaded = traverse_orders(target, 4, 4, {}, 3);
    CHECK(serial.m == threaded.m);
    CHECK(serial.n == threaded.n);
    CHECK(serial.best.filter == threaded.best.filter);
  }
  SUBCASE("forced duplicate abscissae make a cell singular") {
    // Without merging, five initial control points of an order with
    // m + n = 3 land at indices 0, 2, 3, 5, 6; positions 1 and 3 share both
    // the abscissa and the sign of E, so two rows coincide.
    DiscreteTarget target =
        DiscreteTarget::sample({0.0, 0.5, 0.5, 0.5, 0.5, 0.5, 1.0}, [](double x) { return x * x * x; });
    RemezOptions raw;
    raw.merge_duplicate_abscissae = false;
    auto tr = traverse_orders(target, 2, 1, raw);
    CHECK(tr.cells[2 * 2 + 1].status == RemezStatus::kSingularSkip);
    CHECK(tr.cells[2 * 2 + 1].message.find("singular") != std::string::npos);
    CHECK(tr.cells[1 * 2 + 0].status != RemezStatus::kSingularSkip);
  }
  SUBCASE("all cells skipped") {
    auto target = DiscreteTarget::sample({0.5}, [](double) { return 1.0; });
    try {
      traverse_orders(target, 1, 1);
      FAIL("expected no-fit");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kNoFit);
    }
  }
}

TEST_CASE("merged duplicates and insufficient samples") {
  auto target = DiscreteTarget::sample({0.0, 0.5, 0.5, 1.0}, [](double x) { return x; });
  try {
    remez_fit(target, 1, 1);  // 3 distinct samples, 4 needed
    FAIL("expected singular-skip");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSingularSystem);
  }
  CHECK_NOTHROW(remez_fit(target, 1, 0));
}

TEST_CASE("target validation") {
  DiscreteTarget bad{{0.0, 1.0, 0.5}, {1, 2, 3}};
  CHECK_THROWS_AS(remez_fit(bad, 0, 0), Error);
  DiscreteTarget nan{{0.0, 1.0}, {NAN, 2}};
  CHECK_THROWS_AS(remez_fit(nan, 0, 0), Error);
}

TEST_CASE("minimax polynomial in the Chebyshev basis") {
  auto target = DiscreteTarget::sample(grid(20001, -1.0, 1.0), [](double x) { return std::abs(x); });
  for (std::size_t deg : {2, 6, 10}) {
    auto mp = minimax_polynomial(target, deg, PolyBasis::kChebyshev);
    CHECK(mp.state.status == RemezStatus::kConverged);
    double mx = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i)
      mx = std::max(mx, std::abs(target.ys[i] - eval_poly(mp.filter, target.ts[i])));
    CHECK(mx == doctest::Approx(mp.state.best_max_residual).epsilon(1e-9));
    if (deg == 2) CHECK(mx == doctest::Approx(0.125).epsilon(1e-6));  // |x| - (x^2 + 1/8)
  }
}
