#include "ratgraph/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "ratgraph/error.hpp"
#include "ratgraph/format.hpp"
#include "ratgraph/kernels.hpp"
#include "ratgraph/parallel.hpp"

namespace ratgraph {
namespace {

using nlohmann::json;

double sign(double x) { return (x > 0.0) - (x < 0.0); }

std::string hex(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex;
  s.width(16);
  s.fill('0');
  s << v;
  return s.str();
}

[[noreturn]] void parse_fail(const std::string& what) {
  throw Error(ErrorCode::kParse, "experiment config: " + what);
}

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) parse_fail(where + " must be an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) parse_fail("unknown key '" + key + "' in " + where);
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    parse_fail(std::string("bad value for '") + key + "'");
  }
}

std::size_t read_size(const json& j, const char* key, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    parse_fail(std::string("'") + key + "' must be a non-negative integer");
  return v.get<std::size_t>();
}

RationalFilter padded(RationalFilter f, std::size_t m, std::size_t n) {
  f.psi.resize(std::max(f.psi.size(), m + 1), 0.0);
  f.phi.resize(std::max(f.phi.size(), n), 0.0);
  return f;
}

struct Context {
  const ExperimentSpec& spec;
  const EigenSystem& es;
  const ExperimentTarget& target;
  const SpectralProblem& problem;
  const std::optional<TraversalResult>& remez;
};

void finish_rational(FitReport& r, const Context& c, const RationalFilter& f) {
  const std::vector<double> pred = eval_rational(f, c.problem.ts, c.spec.train.pole_guard);
  r.spectral_mse = spectral_loss(f, c.problem, c.spec.train.pole_guard);
  r.vertex_mse = vertex_mse(c.es, pred, c.target.vertex_truth);
  r.rational = f;
}

void finish_polynomial(FitReport& r, const Context& c, const PolynomialFilter& f,
                       std::span<const double> abscissae) {
  const std::vector<double> pred = eval_poly(f, abscissae);
  r.spectral_mse = kernels::squared_distance(pred, c.problem.y_hat) /
                   static_cast<double>(pred.size());
  r.vertex_mse = vertex_mse(c.es, pred, c.target.vertex_truth);
  r.polynomial = f;
}

void train_into(FitReport& r, const Context& c, const RationalFilter& init) {
  TrainResult t = train(init, c.problem, c.spec.train);
  r.epochs = t.epochs;
  r.trace = std::move(t.trace);
  finish_rational(r, c, t.filter);
}

FitReport run_method(Method method, const Context& c) {
  const ExperimentSpec& s = c.spec;
  FitReport r;
  r.method = std::string(to_string(method));
  const auto start = std::chrono::steady_clock::now();
  try {
    switch (method) {
      case Method::kRationalRemez:
        r.m = s.m;
        r.n = s.n;
        r.init = InitSource::kRemez;
        train_into(r, c, padded(c.remez->best.filter, s.m, s.n));
        break;
      case Method::kRationalNoRemez:
        r.m = s.m;
        r.n = s.n;
        r.init = InitSource::kZeros;
        train_into(r, c,
                   RationalFilter{std::vector<double>(s.m + 1, 1e-2), std::vector<double>(s.n, 0.0)});
        break;
      case Method::kRemez:
        r.m = c.remez->m;
        r.n = c.remez->n;
        r.init = InitSource::kRemez;
        finish_rational(r, c, c.remez->best.filter);
        break;
      case Method::kPolyLs:
        r.k = s.k;
        finish_polynomial(r, c,
                          fit_poly_least_squares(c.problem.ts, c.problem.y_hat, s.k,
                                                 PolyBasis::kMonomial, s.ls_solver),
                          c.problem.ts);
        break;
      case Method::kChebLs: {
        r.k = s.k;
        std::vector<double> u(c.problem.ts.size());
        for (std::size_t i = 0; i < u.size(); ++i)
          u[i] = std::clamp(2.0 * c.problem.ts[i] - 1.0, -1.0, 1.0);
        finish_polynomial(
            r, c, fit_poly_least_squares(u, c.problem.y_hat, s.k, PolyBasis::kChebyshev, s.ls_solver),
            u);
        break;
      }
      case Method::kPolyGd: {
        r.k = s.k;
        r.init = InitSource::kZeros;
        train_into(r, c, RationalFilter{std::vector<double>(s.k + 1, 0.0), {}});
        PolynomialFilter p{r.rational->psi, PolyBasis::kMonomial};
        r.rational.reset();
        r.polynomial = std::move(p);
        break;
      }
      case Method::kLinear:
        r.k = 1;
        finish_polynomial(r, c,
                          fit_poly_least_squares(c.problem.ts, c.problem.y_hat, 1,
                                                 PolyBasis::kMonomial, s.ls_solver),
                          c.problem.ts);
        break;
    }
  } catch (const std::exception& e) {
    r.error = r.method + ": " + e.what();
    r.rational.reset();
    r.polynomial.reset();
  }
  if (s.timing)
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

json to_json(const GraphSummary& g) {
  return {{"vertices", g.vertices},     {"edges", g.edges},
          {"dropped_edges", g.dropped_edges}, {"components", g.components},
          {"lambda_max", g.lambda_max}, {"truth_dirichlet_energy", g.truth_energy},
          {"cache_key", g.cache_key}};
}

void write_run(const RunResult& run, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ostringstream csv;
  write_results_csv(run.reports, csv);
  write_text(dir / "results.csv", csv.str());
  for (const auto& r : run.reports) {
    json j = to_json(r);
    write_text(dir / (r.method + ".json"), j.dump(2) + "\n");
    if (!r.trace.empty()) {
      std::ostringstream t;
      write_trace_csv(r.trace, t);
      write_text(dir / (r.method + ".trace.csv"), t.str());
    }
  }
  if (run.remez) {
    json cells = json::array();
    for (const auto& c : run.remez->cells)
      cells.push_back({{"m", c.m},
                       {"n", c.n},
                       {"status", std::string(to_string(c.status))},
                       {"max_residual", std::isfinite(c.max_residual) ? json(c.max_residual) : json()},
                       {"message", c.message}});
    json j{{"selected", {{"m", run.remez->m}, {"n", run.remez->n}}},
           {"cells", cells},
           {"state", to_json(run.remez->best.state)}};
    write_text(dir / "remez_orders.json", j.dump(2) + "\n");
  }
  json g = to_json(run.graph);
  g["seed"] = run.seed;
  write_text(dir / "graph.json", g.dump(2) + "\n");
}

bool needs_remez(const std::vector<Method>& methods) {
  for (Method m : methods)
    if (m == Method::kRationalRemez || m == Method::kRemez) return true;
  return false;
}

RunResult run_once(const ExperimentSpec& spec, std::uint64_t seed, unsigned threads) {
  RunResult run;
  run.seed = seed;
  Graph graph;
  if (spec.graph.edge_list) {
    EdgeListReadResult read = read_edge_list(*spec.graph.edge_list);
    graph = std::move(read.graph);
    run.graph.dropped_edges = read.dropped;
  } else {
    BlockGraphParams params = spec.graph.synthetic;
    params.seed = seed;
    graph = generate_block_graph(params);
  }
  run.graph.vertices = graph.num_vertices();
  run.graph.edges = graph.num_edges();
  run.graph.components = connected_components(graph);
  run.graph.cache_key = hex(graph_content_hash(graph));

  const Matrix laplacian = build_laplacian(graph);
  std::optional<EigenSystem> cached;
  if (spec.cache_dir) cached = load_eigensystem(*spec.cache_dir, run.graph.cache_key);
  EigenSystem es = cached ? std::move(*cached) : decompose(laplacian);
  if (spec.cache_dir && !cached) {
    std::filesystem::create_directories(*spec.cache_dir);
    save_eigensystem(es, *spec.cache_dir, run.graph.cache_key);
  }
  run.graph.lambda_max = es.lambda_max();

  const ExperimentTarget target = make_target(es, spec.target);
  run.graph.truth_energy = dirichlet_energy(laplacian, target.vertex_truth);
  const SpectralProblem problem = SpectralProblem::from_target(target.spectral);

  if (needs_remez(spec.methods)) {
    RemezOptions ro;
    ro.pole_guard = spec.train.pole_guard;
    try {
      run.remez = traverse_orders(target.spectral, spec.m, spec.n, ro, threads);
    } catch (const Error&) {
      // reported per method below
    }
  }

  const Context ctx{spec, es, target, problem, run.remez};
  run.reports.resize(spec.methods.size());
  parallel_for(spec.methods.size(), threads, [&](std::size_t i) {
    const Method method = spec.methods[i];
    if ((method == Method::kRationalRemez || method == Method::kRemez) && !run.remez) {
      run.reports[i].method = std::string(to_string(method));
      run.reports[i].error = run.reports[i].method + ": no pole-free Remez fit at any order";
      return;
    }
    run.reports[i] = run_method(method, ctx);
  });
  return run;
}

std::vector<MethodSummary> summarize(const ExperimentSpec& spec, const std::vector<RunResult>& runs) {
  std::vector<MethodSummary> out;
  for (std::size_t i = 0; i < spec.methods.size(); ++i) {
    MethodSummary s;
    s.method = std::string(to_string(spec.methods[i]));
    std::vector<double> se, ve;
    for (const auto& run : runs)
      if (run.reports[i].ok()) {
        se.push_back(run.reports[i].spectral_mse);
        ve.push_back(run.reports[i].vertex_mse);
      }
    s.runs = se.size();
    auto stats = [](const std::vector<double>& v, double& mean, double& sd) {
      mean = sd = std::nan("");
      if (v.empty()) return;
      mean = 0.0;
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      sd = 0.0;
      for (double x : v) sd += (x - mean) * (x - mean);
      sd = v.size() > 1 ? std::sqrt(sd / static_cast<double>(v.size() - 1)) : 0.0;
    };
    stats(se, s.s_err_mean, s.s_err_std);
    stats(ve, s.v_err_mean, s.v_err_std);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

std::string TargetSpec::name() const {
  switch (kind) {
    case TargetKind::kAbs:
      return "abs";
    case TargetKind::kSign:
      return "sign";
    case TargetKind::kHighpass:
      return "highpass";
    case TargetKind::kJump:
      return "jump";
  }
  return "unknown";
}

TargetSpec parse_target(std::string_view name) {
  if (name == "abs") return {TargetKind::kAbs, {}};
  if (name == "sign") return {TargetKind::kSign, {}};
  if (name == "highpass") return {TargetKind::kHighpass, {}};
  throw Error(ErrorCode::kInvalidParameter,
              "unknown target '" + std::string(name) + "' (expected abs, sign or highpass)");
}

double eval_target(const TargetSpec& target, double t) {
  switch (target.kind) {
    case TargetKind::kAbs:
      return std::abs(t - 0.5);
    case TargetKind::kSign:
      return sign(t - 0.5);
    case TargetKind::kHighpass:
      return (sign(t - 0.5) + 1.0) / 2.0;
    case TargetKind::kJump:
      return eval_jump(target.jump, t);
  }
  return 0.0;
}

ExperimentTarget make_target(const EigenSystem& es, const TargetSpec& target) {
  if (target.kind == TargetKind::kJump) target.jump.validate();
  ExperimentTarget out;
  out.spectral = DiscreteTarget::sample(es.normalized_eigenvalues(),
                                        [&](double t) { return eval_target(target, t); });
  out.vertex_truth = igft(es, out.spectral.ys);
  return out;
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::kRationalRemez:
      return "rational-remez";
    case Method::kRationalNoRemez:
      return "rational-no-remez";
    case Method::kRemez:
      return "remez";
    case Method::kPolyLs:
      return "poly-ls";
    case Method::kChebLs:
      return "cheb-ls";
    case Method::kPolyGd:
      return "poly-gd";
    case Method::kLinear:
      return "linear";
  }
  return "unknown";
}

std::vector<Method> all_methods() {
  return {Method::kRationalRemez, Method::kRationalNoRemez, Method::kRemez, Method::kPolyLs,
          Method::kChebLs,        Method::kPolyGd,          Method::kLinear};
}

Method parse_method(std::string_view name) {
  for (Method m : all_methods())
    if (to_string(m) == name) return m;
  throw Error(ErrorCode::kInvalidParameter, "unknown method '" + std::string(name) + "'");
}

void ExperimentSpec::validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kInvalidParameter, "experiment: " + what);
  };
  if (methods.empty()) fail("at least one method is required");
  if (repeats == 0) fail("repeats must be positive");
  if (!graph.edge_list) {
    if (graph.synthetic.num_groups == 0 || graph.synthetic.group_size == 0)
      fail("synthetic graph needs positive groups and group size");
  }
  if (target.kind == TargetKind::kJump) target.jump.validate();
  train.validate();
}

ExperimentSpec spec_from_json(const json& j) {
  check_keys(j, "config", {"graph", "target", "methods", "m", "n", "k", "train", "ls_solver",
                           "seed", "repeats", "threads", "out_dir", "cache_dir", "timing"});
  ExperimentSpec s;
  if (j.contains("graph")) {
    const json& g = j.at("graph");
    check_keys(g, "graph", {"edge_list", "groups", "group_size", "intra_max", "inter_max"});
    if (g.contains("edge_list")) {
      std::string path;
      read(g, "edge_list", path);
      s.graph.edge_list = path;
    }
    s.graph.synthetic.num_groups = read_size(g, "groups", s.graph.synthetic.num_groups);
    s.graph.synthetic.group_size = read_size(g, "group_size", s.graph.synthetic.group_size);
    s.graph.synthetic.intra_max = read_size(g, "intra_max", s.graph.synthetic.intra_max);
    s.graph.synthetic.inter_max = read_size(g, "inter_max", s.graph.synthetic.inter_max);
  }
  if (j.contains("target")) {
    const json& t = j.at("target");
    if (t.is_string()) {
      try {
        s.target = parse_target(t.get<std::string>());
      } catch (const Error& e) {
        parse_fail(e.what());
      }
    } else {
      check_keys(t, "target", {"a", "b", "sigma", "shift"});
      s.target.kind = TargetKind::kJump;
      s.target.jump.shift = 0.5;
      read(t, "a", s.target.jump.a);
      read(t, "b", s.target.jump.b);
      read(t, "sigma", s.target.jump.sigma);
      read(t, "shift", s.target.jump.shift);
    }
  }
  if (j.contains("methods")) {
    std::vector<std::string> names;
    read(j, "methods", names);
    s.methods.clear();
    for (const auto& name : names) {
      try {
        s.methods.push_back(parse_method(name));
      } catch (const Error& e) {
        parse_fail(e.what());
      }
    }
  }
  s.m = read_size(j, "m", s.m);
  s.n = read_size(j, "n", s.n);
  s.k = read_size(j, "k", s.k);
  if (j.contains("train")) {
    const json& t = j.at("train");
    check_keys(t, "train", {"method", "learning_rate", "max_epochs", "tol", "window", "pole_guard"});
    if (t.contains("method")) {
      std::string name;
      read(t, "method", name);
      try {
        s.train.method = parse_train_method(name);
      } catch (const Error& e) {
        parse_fail(e.what());
      }
    }
    read(t, "learning_rate", s.train.learning_rate);
    s.train.max_epochs = read_size(t, "max_epochs", s.train.max_epochs);
    read(t, "tol", s.train.tol);
    s.train.window = read_size(t, "window", s.train.window);
    read(t, "pole_guard", s.train.pole_guard);
  }
  if (j.contains("ls_solver")) {
    std::string name;
    read(j, "ls_solver", name);
    if (name == "qr")
      s.ls_solver = LeastSquaresSolver::kQr;
    else if (name == "normal")
      s.ls_solver = LeastSquaresSolver::kNormalEquations;
    else
      parse_fail("ls_solver must be qr or normal");
  }
  read(j, "seed", s.seed);
  s.repeats = read_size(j, "repeats", s.repeats);
  s.threads = static_cast<unsigned>(read_size(j, "threads", s.threads));
  if (j.contains("out_dir")) {
    std::string p;
    read(j, "out_dir", p);
    s.out_dir = p;
  }
  if (j.contains("cache_dir")) {
    std::string p;
    read(j, "cache_dir", p);
    s.cache_dir = p;
  }
  read(j, "timing", s.timing);
  return s;
}

json to_json(const ExperimentSpec& s) {
  json j;
  json g;
  if (s.graph.edge_list) {
    g["edge_list"] = s.graph.edge_list->string();
  } else {
    g = {{"groups", s.graph.synthetic.num_groups},
         {"group_size", s.graph.synthetic.group_size},
         {"intra_max", s.graph.synthetic.intra_max},
         {"inter_max", s.graph.synthetic.inter_max}};
  }
  j["graph"] = g;
  if (s.target.kind == TargetKind::kJump)
    j["target"] = {{"a", s.target.jump.a},
                   {"b", s.target.jump.b},
                   {"sigma", s.target.jump.sigma},
                   {"shift", s.target.jump.shift}};
  else
    j["target"] = s.target.name();
  json methods = json::array();
  for (Method m : s.methods) methods.push_back(std::string(to_string(m)));
  j["methods"] = methods;
  j["m"] = s.m;
  j["n"] = s.n;
  j["k"] = s.k;
  j["train"] = {{"method", std::string(to_string(s.train.method))},
                {"learning_rate", s.train.learning_rate},
                {"max_epochs", s.train.max_epochs},
                {"tol", s.train.tol},
                {"window", s.train.window},
                {"pole_guard", s.train.pole_guard}};
  j["ls_solver"] = s.ls_solver == LeastSquaresSolver::kQr ? "qr" : "normal";
  j["seed"] = s.seed;
  j["repeats"] = s.repeats;
  j["timing"] = s.timing;
  return j;
}

ExperimentSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
  return spec_from_json(j);
}

bool ExperimentResult::all_ok() const {
  for (const auto& run : runs)
    for (const auto& r : run.reports)
      if (!r.ok()) return false;
  return true;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const unsigned threads =
      spec.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : spec.threads;
  ExperimentResult result;
  for (std::size_t r = 0; r < spec.repeats; ++r)
    result.runs.push_back(run_once(spec, spec.seed + r, threads));
  result.summary = summarize(spec, result.runs);

  if (spec.out_dir) {
    const auto& dir = *spec.out_dir;
    std::filesystem::create_directories(dir);
    if (spec.repeats == 1) {
      write_run(result.runs.front(), dir);
    } else {
      for (const auto& run : result.runs)
        write_run(run, dir / ("seed-" + std::to_string(run.seed)));
    }
    std::ostringstream csv;
    write_summary_csv(result.summary, csv);
    write_text(dir / "summary.csv", csv.str());
    write_text(dir / "config.json", to_json(spec).dump(2) + "\n");
  }
  return result;
}

void write_results_csv(std::span<const FitReport> reports, std::ostream& out) {
  out << "method,m,n,k,s_err,v_err,epochs,seconds\n";
  for (const auto& r : reports) {
    const double nan = std::nan("");
    out << r.method << ',' << r.m << ',' << r.n << ',' << r.k << ','
        << format_double(r.ok() ? r.spectral_mse : nan) << ','
        << format_double(r.ok() ? r.vertex_mse : nan) << ',' << r.epochs << ','
        << format_double(r.seconds) << '\n';
  }
}

void write_summary_csv(std::span<const MethodSummary> summary, std::ostream& out) {
  out << "method,runs,s_err_mean,s_err_std,v_err_mean,v_err_std\n";
  for (const auto& s : summary)
    out << s.method << ',' << s.runs << ',' << format_double(s.s_err_mean) << ','
        << format_double(s.s_err_std) << ',' << format_double(s.v_err_mean) << ','
        << format_double(s.v_err_std) << '\n';
}

double vertex_mse(const EigenSystem& es, std::span<const double> spectral_prediction,
                  std::span<const double> vertex_truth) {
  const std::vector<double> pred = igft(es, spectral_prediction);
  if (pred.size() != vertex_truth.size())
    throw Error(ErrorCode::kInvalidInput, "vertex truth has the wrong length");
  return kernels::squared_distance(pred, vertex_truth) / static_cast<double>(pred.size());
}

}  // namespace ratgraph
