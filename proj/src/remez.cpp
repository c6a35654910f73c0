#include "ratgraph/remez.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "ratgraph/error.hpp"
#include "ratgraph/kernels.hpp"
#include "ratgraph/parallel.hpp"

namespace ratgraph {
namespace {

struct Samples {
  std::vector<double> t;
  std::vector<double> y;
};

// Repeated eigenvalues would put identical rows into the leveling system, so
// abscissae within 1e-12 are merged and their targets averaged.
Samples unique_samples(const DiscreteTarget& target, bool merge) {
  Samples s;
  s.t.reserve(target.size());
  s.y.reserve(target.size());
  std::size_t i = 0;
  while (i < target.size()) {
    std::size_t j = i + 1;
    double sum = target.ys[i];
    if (merge) {
      while (j < target.size() && target.ts[j] - target.ts[i] <= 1e-12) sum += target.ys[j++];
    }
    s.t.push_back(target.ts[i]);
    s.y.push_back(sum / static_cast<double>(j - i));
    i = j;
  }
  return s;
}

void numerator_columns(double x, std::size_t m, PolyBasis basis, double* out) {
  out[0] = 1.0;
  if (m == 0) return;
  out[1] = x;
  for (std::size_t k = 2; k <= m; ++k)
    out[k] = basis == PolyBasis::kMonomial ? out[k - 1] * x : 2.0 * x * out[k - 1] - out[k - 2];
}

void eval_numerator(std::span<const double> coeffs, PolyBasis basis, std::span<const double> t,
                    std::span<double> out) {
  if (basis == PolyBasis::kMonomial) {
    kernels::horner(coeffs, t, out);
    return;
  }
  const PolynomialFilter f{std::vector<double>(coeffs.begin(), coeffs.end()), basis};
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = eval_poly(f, t[i]);
}

std::vector<std::size_t> initial_indices(std::size_t count, std::size_t k) {
  std::vector<std::size_t> idx(k);
  const double step = static_cast<double>(count - 1) / static_cast<double>(k - 1);
  for (std::size_t d = 0; d < k; ++d)
    idx[d] = static_cast<std::size_t>(std::floor(static_cast<double>(d) * step + 0.5));
  return idx;
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

// New control set from the residual r = f - R: one extremum per run of equal
// residual sign, trimmed or padded to k points.
std::vector<std::size_t> exchange(const std::vector<double>& r,
                                  const std::vector<std::size_t>& previous, std::size_t k) {
  const std::size_t count = r.size();
  std::vector<std::size_t> ext;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= count; ++i) {
    if (i == count || (sign_of(r[i]) != sign_of(r[start]) && sign_of(r[i]) != 0)) {
      std::size_t best = start;
      for (std::size_t j = start + 1; j < i; ++j)
        if (std::abs(r[j]) > std::abs(r[best])) best = j;
      ext.push_back(best);
      start = i;
    }
  }

  auto mag = [&](std::size_t pos) { return std::abs(r[ext[pos]]); };
  while (ext.size() > k) {
    if (ext.size() == k + 1) {
      ext.erase(mag(0) < mag(ext.size() - 1) ? ext.begin() : ext.end() - 1);
      continue;
    }
    std::size_t low = 0;
    for (std::size_t p = 1; p < ext.size(); ++p)
      if (mag(p) < mag(low)) low = p;
    if (low == 0 || low + 1 == ext.size()) {
      ext.erase(ext.begin() + static_cast<std::ptrdiff_t>(low));
    } else {
      // Dropping a neighbouring pair keeps the signs alternating.
      const std::size_t other = mag(low - 1) < mag(low + 1) ? low - 1 : low + 1;
      const std::size_t first = std::min(low, other);
      ext.erase(ext.begin() + static_cast<std::ptrdiff_t>(first),
                ext.begin() + static_cast<std::ptrdiff_t>(first + 2));
    }
  }

  if (ext.size() < k) {
    std::vector<std::size_t> extra;
    for (std::size_t p : previous)
      if (std::find(ext.begin(), ext.end(), p) == ext.end()) extra.push_back(p);
    std::stable_sort(extra.begin(), extra.end(),
                     [&](std::size_t a, std::size_t b) { return std::abs(r[a]) > std::abs(r[b]); });
    for (std::size_t p = 0; p < extra.size() && ext.size() < k; ++p) ext.push_back(extra[p]);
  }
  std::sort(ext.begin(), ext.end());
  return ext;
}

std::string order_label(std::size_t m, std::size_t n) {
  return "(" + std::to_string(m) + ", " + std::to_string(n) + ")";
}

}  // namespace

DiscreteTarget DiscreteTarget::sample(std::vector<double> ts,
                                      const std::function<double(double)>& f) {
  DiscreteTarget out;
  out.ys.reserve(ts.size());
  for (double t : ts) out.ys.push_back(f(t));
  out.ts = std::move(ts);
  return out;
}

void DiscreteTarget::validate() const {
  if (ts.size() != ys.size())
    throw Error(ErrorCode::kInvalidInput, "target: abscissae and values differ in length");
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!std::isfinite(ts[i]) || !std::isfinite(ys[i]))
      throw Error(ErrorCode::kInvalidInput, "target: non-finite sample at index " +
                                                std::to_string(i));
    if (i > 0 && ts[i] < ts[i - 1])
      throw Error(ErrorCode::kInvalidInput, "target: abscissae not sorted at index " +
                                                std::to_string(i));
  }
}

std::string_view to_string(RemezStatus status) {
  switch (status) {
    case RemezStatus::kRunning:
      return "running";
    case RemezStatus::kConverged:
      return "converged";
    case RemezStatus::kRelaxedStop:
      return "relaxed-stop";
    case RemezStatus::kSingularSkip:
      return "singular-skip";
    case RemezStatus::kPoleSkip:
      return "pole-skip";
  }
  return "unknown";
}

LinearizedSolution solve_linearized(std::span<const double> xs, std::span<const double> ys,
                                    std::size_t m, std::size_t n, double level,
                                    double pivot_tol, PolyBasis numerator_basis) {
  const std::size_t k = m + n + 2;
  if (xs.size() != k || ys.size() != k)
    throw Error(ErrorCode::kInvalidInput, "leveling system needs exactly " + std::to_string(k) +
                                              " control points");
  Matrix a(k, k);
  for (std::size_t d = 0; d < k; ++d) {
    const double s = d % 2 == 0 ? 1.0 : -1.0;
    numerator_columns(xs[d], m, numerator_basis, &a(d, 0));
    const double scale = s * level - ys[d];
    double xp = 1.0;
    for (std::size_t j = 1; j <= n; ++j) {
      xp *= xs[d];
      a(d, m + j) = scale * xp;
    }
    a(d, k - 1) = s;
  }
  const std::vector<double> sol = lu_solve(std::move(a), ys, pivot_tol);
  LinearizedSolution out;
  out.psi.assign(sol.begin(), sol.begin() + static_cast<std::ptrdiff_t>(m + 1));
  out.phi.assign(sol.begin() + static_cast<std::ptrdiff_t>(m + 1), sol.end() - 1);
  out.level = sol.back();
  return out;
}

RemezResult remez_fit(const DiscreteTarget& target, std::size_t m, std::size_t n,
                      const RemezOptions& o) {
  target.validate();
  const Samples s = unique_samples(target, o.merge_duplicate_abscissae);
  const std::size_t count = s.t.size();
  const std::size_t k = m + n + 2;
  if (count < k)
    throw Error(ErrorCode::kSingularSystem,
                "order " + order_label(m, n) + " needs " + std::to_string(k) +
                    " distinct samples, target has " + std::to_string(count));

  RemezResult result;
  RemezState& st = result.state;
  std::vector<std::size_t> idx = initial_indices(count, k);
  std::vector<double> xs(k), ys(k), p(count), q(count), r(count);
  std::optional<std::pair<double, double>> previous_extremes;
  bool have_best = false;
  bool retried = false;
  double level = 0.0;

  for (std::size_t outer = 0; outer < o.max_outer; ++outer) {
    st.outer_iter = outer + 1;
    if (!o.warm_start_level) level = 0.0;
    for (std::size_t d = 0; d < k; ++d) {
      xs[d] = s.t[idx[d]];
      ys[d] = s.y[idx[d]];
    }

    LinearizedSolution sol;
    RemezIteration it;
    it.outer = outer + 1;
    try {
      // Plain fixed-point iteration on E until two successive levels agree
      // within inner_tol, then (optionally) secant steps on the same fixed
      // point so the control residuals level out to rounding.
      double e_in = level;
      double kept_gap = 0.0;
      LinearizedSolution kept;
      std::optional<std::pair<double, double>> secant_prev;
      for (std::size_t inner = 0; inner < o.max_inner; ++inner) {
        sol = solve_linearized(xs, ys, m, n, e_in, o.pivot_tol, o.numerator_basis);
        ++it.inner_iterations;
        ++st.inner_iter;
        if (!std::isfinite(sol.level))
          throw Error(ErrorCode::kSingularSystem, "leveling produced a non-finite level");
        const double gap = sol.level - e_in;
        if (!it.inner_converged) {
          if (!(std::abs(gap) < o.inner_tol)) {
            e_in = sol.level;
            continue;
          }
          it.inner_converged = true;
          if (!o.polish_level) break;
        } else if (!(std::abs(gap) < std::abs(kept_gap))) {
          sol = std::move(kept);  // polishing stalled
          break;
        }
        kept = sol;
        kept_gap = gap;
        if (std::abs(gap) <= o.polish_tol * (1.0 + std::abs(sol.level))) break;
        double next = sol.level;
        if (secant_prev && gap != secant_prev->second)
          next = e_in - gap * (e_in - secant_prev->first) / (gap - secant_prev->second);
        secant_prev = {e_in, gap};
        e_in = next;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kSingularSystem) throw;
      if (!have_best) {
        st.status = RemezStatus::kSingularSkip;
        throw Error(ErrorCode::kSingularSystem,
                    "order " + order_label(m, n) + " singular: " + e.what());
      }
      st.status = RemezStatus::kRelaxedStop;
      break;
    }

    level = sol.level;
    st.control_indices = idx;
    st.control_points = xs;
    st.control_values = ys;
    st.level = level;
    st.psi = sol.psi;
    st.phi = sol.phi;
    st.last_inner_converged = it.inner_converged;
    it.level = level;

    eval_numerator(sol.psi, o.numerator_basis, s.t, p);
    std::vector<double> qc{1.0};
    qc.insert(qc.end(), sol.phi.begin(), sol.phi.end());
    kernels::horner(qc, s.t, q);
    // Q(0) = 1, so a non-positive sample means a root inside the sample range.
    it.pole = std::any_of(q.begin(), q.end(),
                          [&](double v) { return !(v > o.pole_guard) || !std::isfinite(v); });
    if (it.pole) {
      st.trace.push_back(it);
      if (retried) {
        st.status = RemezStatus::kRelaxedStop;
        break;
      }
      retried = true;
      for (std::size_t d = 1; d + 1 < k; ++d) idx[d] = std::min(idx[d] + 1, count - 1);
      continue;
    }

    double mx = 0.0;
    it.residual_min = INFINITY;
    it.residual_max = -INFINITY;
    for (std::size_t i = 0; i < count; ++i) {
      r[i] = s.y[i] - p[i] / q[i];
      mx = std::max(mx, std::abs(r[i]));
      it.residual_min = std::min(it.residual_min, r[i]);
      it.residual_max = std::max(it.residual_max, r[i]);
    }
    it.max_residual = mx;
    st.trace.push_back(it);

    if (!have_best || mx < st.best_max_residual) {
      have_best = true;
      st.best_max_residual = mx;
      result.filter = RationalFilter{sol.psi, sol.phi};
    }
    if (mx <= std::abs(level) + o.converged_slack) {
      st.status = RemezStatus::kConverged;
      break;
    }
    if (previous_extremes &&
        std::abs(previous_extremes->first - it.residual_min) < o.repeat_tol &&
        std::abs(previous_extremes->second - it.residual_max) < o.repeat_tol) {
      st.status = RemezStatus::kRelaxedStop;
      break;
    }
    previous_extremes = {it.residual_min, it.residual_max};
    idx = exchange(r, idx, k);
  }

  if (!have_best) {
    // Every iterate had a pole on the samples; hand back the last one.
    st.status = RemezStatus::kPoleSkip;
    st.best_max_residual = INFINITY;
    result.filter = RationalFilter{st.psi, st.phi};
    return result;
  }
  if (st.status == RemezStatus::kRunning) st.status = RemezStatus::kRelaxedStop;
  return result;
}

TraversalResult traverse_orders(const DiscreteTarget& target, std::size_t m_max,
                                std::size_t n_max, const RemezOptions& options,
                                unsigned threads, double tie_tol) {
  target.validate();
  const std::size_t cols = n_max + 1;
  const std::size_t total = (m_max + 1) * cols;
  std::vector<OrderCell> cells(total);
  std::vector<std::optional<RemezResult>> fits(total);

  parallel_for(total, threads, [&](std::size_t c) {
    OrderCell& cell = cells[c];
    cell.m = c / cols;
    cell.n = c % cols;
    try {
      RemezResult fit = remez_fit(target, cell.m, cell.n, options);
      cell.status = fit.state.status;
      cell.max_residual = fit.state.best_max_residual;
      if (cell.status == RemezStatus::kPoleSkip)
        cell.message = "no pole-free iterate on the samples";
      else
        fits[c] = std::move(fit);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kSingularSystem) {
        cell.status = RemezStatus::kSingularSkip;
      } else if (e.code() == ErrorCode::kPole) {
        cell.status = RemezStatus::kPoleSkip;
      } else {
        throw;
      }
      cell.message = e.what();
    }
  });

  double lowest = INFINITY;
  for (std::size_t c = 0; c < total; ++c)
    if (fits[c]) lowest = std::min(lowest, cells[c].max_residual);
  if (!std::isfinite(lowest))
    throw Error(ErrorCode::kNoFit, "every (m, n) order up to " + order_label(m_max, n_max) +
                                       " was skipped");

  std::optional<std::size_t> pick;
  for (std::size_t c = 0; c < total; ++c) {
    if (!fits[c] || cells[c].max_residual > lowest + tie_tol) continue;
    if (!pick) {
      pick = c;
      continue;
    }
    const auto key = [&](std::size_t i) {
      return std::pair{cells[i].m + cells[i].n, cells[i].n};
    };
    if (key(c) < key(*pick)) pick = c;
  }

  TraversalResult out;
  out.best = std::move(*fits[*pick]);
  out.m = cells[*pick].m;
  out.n = cells[*pick].n;
  out.cells = std::move(cells);
  return out;
}

MinimaxPolynomial minimax_polynomial(const DiscreteTarget& target, std::size_t degree,
                                     PolyBasis basis, const RemezOptions& options) {
  RemezOptions o = options;
  o.numerator_basis = basis;
  RemezResult fit = remez_fit(target, degree, 0, o);
  return {PolynomialFilter{fit.filter.psi, basis}, std::move(fit.state)};
}

nlohmann::json to_json(const RemezState& st) {
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& it : st.trace) {
    trace.push_back({{"outer", it.outer},
                     {"inner_iterations", it.inner_iterations},
                     {"inner_converged", it.inner_converged},
                     {"pole", it.pole},
                     {"level", it.level},
                     {"max_residual", it.max_residual},
                     {"residual_min", it.residual_min},
                     {"residual_max", it.residual_max}});
  }
  return {{"status", std::string(to_string(st.status))},
          {"outer_iter", st.outer_iter},
          {"inner_iter", st.inner_iter},
          {"level", st.level},
          {"best_max_residual", st.best_max_residual},
          {"control_points", st.control_points},
          {"psi", st.psi},
          {"phi", st.phi},
          {"trace", trace}};
}

}  // namespace ratgraph
