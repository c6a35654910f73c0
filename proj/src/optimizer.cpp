#include "ratgraph/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "ratgraph/error.hpp"
#include "ratgraph/format.hpp"
#include "ratgraph/kernels.hpp"
#include "ratgraph/linalg.hpp"

namespace ratgraph {
namespace {

struct Evaluation {
  std::vector<double> p, q, e;  // e = R x_hat - y_hat
  double loss = 0.0;
};

Evaluation evaluate(const RationalFilter& f, const SpectralProblem& pr) {
  const std::size_t n = pr.size();
  Evaluation ev;
  ev.p.resize(n);
  ev.q.resize(n);
  ev.e.resize(n);
  eval_rational_parts(f, pr.ts, ev.p, ev.q);
  for (std::size_t d = 0; d < n; ++d) ev.e[d] = ev.p[d] / ev.q[d] * pr.x_hat[d] - pr.y_hat[d];
  ev.loss = n == 0 ? 0.0 : kernels::dot(ev.e, ev.e) / static_cast<double>(n);
  return ev;
}

void check_problem(const SpectralProblem& pr) {
  if (pr.ts.size() != pr.y_hat.size() || pr.ts.size() != pr.x_hat.size())
    throw Error(ErrorCode::kInvalidInput, "spectral problem: ts, y_hat and x_hat differ in length");
  if (pr.ts.empty()) throw Error(ErrorCode::kInvalidInput, "spectral problem: no samples");
}

void check_guard(const Evaluation& ev, const SpectralProblem& pr, double guard) {
  for (std::size_t d = 0; d < ev.q.size(); ++d)
    if (!(std::abs(ev.q[d]) >= guard))
      throw Error(ErrorCode::kPole, "pole at sample t = " + format_double(pr.ts[d]) +
                                        " (|Q| = " + format_double(std::abs(ev.q[d])) + ")");
}

bool positive_denominator(const Evaluation& ev, double guard) {
  return std::all_of(ev.q.begin(), ev.q.end(), [&](double q) { return q > guard; });
}

std::vector<double> flatten(const RationalFilter& f) {
  std::vector<double> v(f.psi);
  v.insert(v.end(), f.phi.begin(), f.phi.end());
  return v;
}

RationalFilter unflatten(std::span<const double> v, std::size_t np) {
  RationalFilter f;
  f.psi.assign(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(np));
  f.phi.assign(v.begin() + static_cast<std::ptrdiff_t>(np), v.end());
  return f;
}

Gradients gradients_from(const Evaluation& ev, const SpectralProblem& pr, std::size_t np,
                         std::size_t nq) {
  const std::size_t n = pr.size();
  const double scale = 2.0 / static_cast<double>(n);
  std::vector<double> wp(n), wq(n);
  for (std::size_t d = 0; d < n; ++d) {
    const double base = ev.e[d] * pr.x_hat[d] / ev.q[d];
    wp[d] = scale * base;
    wq[d] = -scale * base * ev.p[d] / ev.q[d];
  }
  Gradients g;
  g.dpsi.resize(np);
  kernels::power_sums(wp, pr.ts, g.dpsi);
  std::vector<double> sums(nq + 1);
  kernels::power_sums(wq, pr.ts, sums);
  g.dphi.assign(sums.begin() + 1, sums.end());
  return g;
}

// Minimizer of ||r + J delta||^2 + mu ||D delta||^2 with D the column norms of J.
std::vector<double> damped_step(const Evaluation& ev, const SpectralProblem& pr, std::size_t np,
                                std::size_t nq, double mu) {
  const std::size_t n = pr.size();
  const std::size_t cols = np + nq;
  Matrix a(n + cols, cols);
  std::vector<double> b(n + cols, 0.0);
  for (std::size_t d = 0; d < n; ++d) {
    const double base = pr.x_hat[d] / ev.q[d];
    const double r = ev.p[d] / ev.q[d];
    const double t = pr.ts[d];
    double tp = 1.0;
    for (std::size_t i = 0; i < np; ++i, tp *= t) a(d, i) = base * tp;
    tp = t;
    for (std::size_t j = 0; j < nq; ++j, tp *= t) a(d, np + j) = -base * r * tp;
    b[d] = -ev.e[d];
  }
  const double root_mu = std::sqrt(mu);
  for (std::size_t c = 0; c < cols; ++c) {
    double s = 0.0;
    for (std::size_t d = 0; d < n; ++d) s += a(d, c) * a(d, c);
    a(n + c, c) = root_mu * std::max(std::sqrt(s), 1e-12);
  }
  return qr_least_squares(std::move(a), std::move(b));
}

}  // namespace

std::string_view to_string(TrainMethod method) {
  return method == TrainMethod::kGradientDescent ? "gd" : "lm";
}

TrainMethod parse_train_method(std::string_view name) {
  if (name == "gd") return TrainMethod::kGradientDescent;
  if (name == "lm") return TrainMethod::kLevenbergMarquardt;
  throw Error(ErrorCode::kInvalidParameter,
              "unknown training method '" + std::string(name) + "' (expected gd or lm)");
}

void TrainConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kInvalidParameter, "train config: " + what);
  };
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
    fail("learning_rate must be finite and non-negative");
  if (max_epochs == 0) fail("max_epochs must be positive");
  if (!(tol >= 0.0)) fail("tol must be non-negative");
  if (window == 0) fail("window must be positive");
  if (!(pole_guard > 0.0)) fail("pole_guard must be positive");
  if (!(blowup_factor > 1.0)) fail("blowup_factor must exceed 1");
  if (!(initial_damping > 0.0)) fail("initial_damping must be positive");
  if (max_damping_tries == 0) fail("max_damping_tries must be positive");
}

SpectralProblem SpectralProblem::from_target(const DiscreteTarget& target,
                                             std::vector<double> x_hat) {
  SpectralProblem pr;
  pr.ts = target.ts;
  pr.y_hat = target.ys;
  pr.x_hat = x_hat.empty() ? std::vector<double>(target.size(), 1.0) : std::move(x_hat);
  return pr;
}

double spectral_loss(const RationalFilter& f, const SpectralProblem& problem, double pole_guard) {
  check_problem(problem);
  const Evaluation ev = evaluate(f, problem);
  check_guard(ev, problem, pole_guard);
  return ev.loss;
}

Gradients gradients(const RationalFilter& f, const SpectralProblem& problem, double pole_guard) {
  check_problem(problem);
  const Evaluation ev = evaluate(f, problem);
  check_guard(ev, problem, pole_guard);
  return gradients_from(ev, problem, f.psi.size(), f.phi.size());
}

bool pole_free(const RationalFilter& f, std::span<const double> ts, double pole_guard) {
  std::vector<double> p(ts.size()), q(ts.size());
  eval_rational_parts(f, ts, p, q);
  return std::all_of(q.begin(), q.end(), [&](double v) { return v > pole_guard; });
}

TrainResult train(const RationalFilter& f0, const SpectralProblem& problem,
                  const TrainConfig& cfg) {
  cfg.validate();
  check_problem(problem);
  if (f0.psi.empty()) throw Error(ErrorCode::kInvalidInput, "train: empty numerator");
  const std::size_t np = f0.psi.size();
  const std::size_t nq = f0.phi.size();

  Evaluation cur = evaluate(f0, problem);
  if (!positive_denominator(cur, cfg.pole_guard))
    throw Error(ErrorCode::kPole, "train: initial filter has a pole on the samples");

  TrainResult res;
  res.filter = f0;
  res.loss = cur.loss;
  res.trace.push_back(cur.loss);
  std::vector<double> x = flatten(f0);
  std::vector<double> best_history{cur.loss};  // running minimum per epoch
  double mu = cfg.initial_damping;

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    bool accepted = false;
    if (cfg.method == TrainMethod::kGradientDescent) {
      const Gradients g = gradients_from(cur, problem, np, nq);
      double step = cfg.learning_rate;
      for (std::size_t h = 0; h <= cfg.max_halvings && !accepted; ++h, step *= 0.5) {
        std::vector<double> cand = x;
        for (std::size_t i = 0; i < np; ++i) cand[i] -= step * g.dpsi[i];
        for (std::size_t j = 0; j < nq; ++j) cand[np + j] -= step * g.dphi[j];
        Evaluation ev = evaluate(unflatten(cand, np), problem);
        if (!positive_denominator(ev, cfg.pole_guard) || !std::isfinite(ev.loss) ||
            ev.loss > cfg.blowup_factor * cur.loss)
          continue;
        x = std::move(cand);
        cur = std::move(ev);
        accepted = true;
      }
    } else {
      for (std::size_t tries = 0; tries < cfg.max_damping_tries && !accepted; ++tries) {
        std::vector<double> delta;
        try {
          delta = damped_step(cur, problem, np, nq, mu);
        } catch (const Error&) {
          mu *= 4.0;
          continue;
        }
        std::vector<double> cand = x;
        for (std::size_t i = 0; i < cand.size(); ++i) cand[i] += delta[i];
        Evaluation ev = evaluate(unflatten(cand, np), problem);
        if (positive_denominator(ev, cfg.pole_guard) && ev.loss < cur.loss) {
          x = std::move(cand);
          cur = std::move(ev);
          mu = std::max(mu / 3.0, 1e-15);
          accepted = true;
        } else {
          mu = std::min(mu * 4.0, 1e300);
        }
      }
    }
    if (!accepted) ++res.rejected_epochs;
    res.epochs = epoch;
    res.trace.push_back(cur.loss);
    if (cur.loss < res.loss) {
      res.loss = cur.loss;
      res.filter = unflatten(x, np);
    }
    best_history.push_back(res.loss);
    if (epoch >= cfg.window && best_history[epoch - cfg.window] - res.loss <= cfg.tol) break;
  }
  return res;
}

std::string_view to_string(InitSource init) {
  switch (init) {
    case InitSource::kRemez:
      return "remez";
    case InitSource::kZeros:
      return "zeros";
    case InitSource::kGiven:
      return "given";
  }
  return "unknown";
}

nlohmann::json to_json(const FitReport& r) {
  nlohmann::json j;
  j["method"] = r.method;
  j["m"] = r.m;
  j["n"] = r.n;
  j["k"] = r.k;
  j["init"] = std::string(to_string(r.init));
  if (r.rational) j["coefficients"] = to_json(*r.rational);
  if (r.polynomial) j["coefficients"] = to_json(*r.polynomial);
  if (r.ok()) {
    j["spectral_mse"] = r.spectral_mse;
    j["vertex_mse"] = r.vertex_mse;
  } else {
    j["error"] = r.error;
  }
  j["epochs"] = r.epochs;
  j["seconds"] = r.seconds;
  return j;
}

void write_trace_csv(std::span<const double> trace, std::ostream& out) {
  out << "epoch,loss\n";
  for (std::size_t e = 0; e < trace.size(); ++e) out << e << ',' << format_double(trace[e]) << '\n';
}

}  // namespace ratgraph
