// ratgraph command-line front end: gen, fit, theory.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ratgraph/error.hpp"
#include "ratgraph/experiments.hpp"
#include "ratgraph/format.hpp"
#include "ratgraph/graph.hpp"
#include "ratgraph/theory.hpp"

using namespace ratgraph;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

// "5:50:5" (inclusive range with step) or "5,10,20".
std::vector<std::size_t> parse_degrees(const std::string& text) {
  std::vector<std::size_t> out;
  auto number = [&](const std::string& s) -> std::size_t {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != s.size() || s.empty() || s[0] == '-')
      throw std::invalid_argument("'" + s + "' is not a non-negative integer");
    return static_cast<std::size_t>(v);
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw std::invalid_argument("expected first:last:step");
    const std::size_t first = number(parts[0]), last = number(parts[1]), step = number(parts[2]);
    if (step == 0 || last < first) throw std::invalid_argument("empty degree range");
    for (std::size_t d = first; d <= last; d += step) out.push_back(d);
  } else {
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) out.push_back(number(p));
  }
  for (std::size_t d : out)
    if (d < 5) throw std::invalid_argument("degrees must be >= 5, got " + std::to_string(d));
  return out;
}

struct GenOptions {
  std::size_t groups = 5;
  std::size_t group_size = 100;
  std::size_t intra_max = 8;
  std::size_t inter_max = 3;
  std::uint64_t seed = 0;
  std::string out;
};

int run_gen(const GenOptions& o) {
  Graph g = generate_block_graph({o.groups, o.group_size, o.intra_max, o.inter_max, o.seed});
  write_edge_list(g, o.out);
  std::cout << "n " << g.num_vertices() << "\nedges " << g.num_edges() << "\n";
  if (g.num_edges() == 0) std::cerr << "warning: generated graph has no edges\n";
  return 0;
}

struct FitOptions {
  std::string config;
  std::string graph;
  std::size_t groups = 5;
  std::size_t group_size = 100;
  std::string target = "abs";
  std::vector<std::string> methods;
  std::size_t m = 5, n = 5, k = 10;
  double lr = 1e-3;
  std::size_t epochs = 5000;
  std::string optimizer = "lm";
  std::string ls_solver = "qr";
  std::uint64_t seed = 0;
  std::size_t repeats = 1;
  unsigned threads = 0;
  std::string out_dir;
  std::string cache_dir;
  bool timing = false;
};

int run_fit(const FitOptions& o, const CLI::App& cmd) {
  ExperimentSpec spec = o.config.empty() ? ExperimentSpec{} : load_spec(o.config);
  auto given = [&](const char* flag) { return cmd.count(flag) > 0; };
  const bool fresh = o.config.empty();
  if (given("--graph")) spec.graph.edge_list = o.graph;
  if (fresh || given("--groups")) spec.graph.synthetic.num_groups = o.groups;
  if (fresh || given("--group-size")) spec.graph.synthetic.group_size = o.group_size;
  if (fresh || given("--target")) spec.target = parse_target(o.target);
  if (given("--method")) {
    spec.methods.clear();
    for (const auto& name : o.methods) spec.methods.push_back(parse_method(name));
  }
  if (fresh || given("--m")) spec.m = o.m;
  if (fresh || given("--n")) spec.n = o.n;
  if (fresh || given("--k")) spec.k = o.k;
  if (fresh || given("--lr")) spec.train.learning_rate = o.lr;
  if (fresh || given("--epochs")) spec.train.max_epochs = o.epochs;
  if (fresh || given("--optimizer")) spec.train.method = parse_train_method(o.optimizer);
  if (fresh || given("--ls-solver"))
    spec.ls_solver = o.ls_solver == "qr" ? LeastSquaresSolver::kQr : LeastSquaresSolver::kNormalEquations;
  if (fresh || given("--seed")) spec.seed = o.seed;
  if (fresh || given("--repeats")) spec.repeats = o.repeats;
  if (fresh || given("--threads")) spec.threads = o.threads;
  if (given("--out-dir")) spec.out_dir = o.out_dir;
  if (given("--cache-dir")) spec.cache_dir = o.cache_dir;
  if (given("--timing")) spec.timing = o.timing;

  ExperimentResult res = run_experiment(spec);
  for (const auto& run : res.runs) {
    const GraphSummary& g = run.graph;
    std::cout << "# seed " << run.seed << ": " << g.vertices << " vertices, " << g.edges
              << " edges, " << g.components << " components, lambda_max "
              << format_double(g.lambda_max) << ", truth Dirichlet energy "
              << format_double(g.truth_energy) << "\n";
    write_results_csv(run.reports, std::cout);
    for (const auto& r : run.reports)
      if (!r.ok()) std::cerr << "error: " << r.error << "\n";
  }
  if (res.runs.size() > 1) write_summary_csv(res.summary, std::cout);
  return res.all_ok() ? 0 : kExitRuntime;
}

struct TheoryOptions {
  std::string kind = "newman";
  std::string degrees = "5:50:5";
  std::size_t grid = 100000;
  double c = 1.0;
  unsigned threads = 0;
  std::string out;
};

int run_theory(const TheoryOptions& o) {
  const std::vector<std::size_t> degrees = parse_degrees(o.degrees);
  const unsigned threads = o.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : o.threads;
  const JumpTarget abs_target{1.0, 0.0, 0, 0.0};
  std::ostringstream csv;
  bool ok = true;
  if (o.kind == "newman") {
    RateOptions ro{.lo = -o.c, .hi = o.c, .grid_size = o.grid, .threads = threads};
    const auto pts = rate_experiment(RateKind::kRational, abs_target, degrees, ro);
    write_rate_csv(pts, csv);
    for (const auto& p : pts) {
      const bool pass = p.sup_error <= p.bound;
      ok = ok && pass;
      std::cerr << "n " << p.degree << "  sup " << format_double(p.sup_error) << "  bound "
                << format_double(p.bound) << "  " << (pass ? "PASS" : "FAIL") << "\n";
    }
  } else {
    RateOptions ro{.grid_size = o.grid, .threads = threads};
    const auto rat = rate_experiment(RateKind::kRational, abs_target, degrees, ro);
    const auto poly = rate_experiment(RateKind::kPolynomial, abs_target, degrees, ro);
    csv << "degree,rational_sup_error,polynomial_sup_error\n";
    std::vector<double> x, y;
    for (std::size_t i = 0; i < degrees.size(); ++i) {
      csv << degrees[i] << ',' << format_double(rat[i].sup_error) << ','
          << format_double(poly[i].sup_error) << '\n';
      x.push_back(std::sqrt(static_cast<double>(degrees[i])));
      y.push_back(std::log(rat[i].sup_error));
    }
    if (degrees.size() >= 2) {
      const LinearFit fit = fit_line(x, y);
      std::cerr << "log(rational error) ~ " << format_double(fit.slope) << " sqrt(n) + "
                << format_double(fit.intercept) << ", R^2 " << format_double(fit.r2) << "\n";
    }
  }
  if (o.out.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out(o.out, std::ios::binary);
    if (!out) throw Error(ErrorCode::kIo, "cannot write '" + o.out + "'");
    out << csv.str();
  }
  return ok ? 0 : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rational spectral filters on graphs"};
  app.require_subcommand(1);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a random block graph edge list");
  gen_cmd->add_option("--groups", gen.groups, "Number of groups")->capture_default_str();
  gen_cmd->add_option("--group-size", gen.group_size, "Vertices per group")->capture_default_str();
  gen_cmd->add_option("--intra-max", gen.intra_max, "Max intra-group edges per vertex")
      ->capture_default_str();
  gen_cmd->add_option("--inter-max", gen.inter_max, "Max inter-group edges per vertex")
      ->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output edge list")->required();

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit spectral filters on a graph");
  fit_cmd->add_option("--config", fit.config, "Experiment config (JSON); flags override it")
      ->check(CLI::ExistingFile);
  fit_cmd->add_option("--graph", fit.graph, "Edge list (default: synthetic block graph)");
  fit_cmd->add_option("--groups", fit.groups, "Synthetic graph groups")->capture_default_str();
  fit_cmd->add_option("--group-size", fit.group_size, "Synthetic graph group size")
      ->capture_default_str();
  fit_cmd->add_option("--target", fit.target, "Spectral target")
      ->check(CLI::IsMember({"abs", "sign", "highpass"}))
      ->capture_default_str();
  std::vector<std::string> method_names;
  for (Method m : all_methods()) method_names.emplace_back(to_string(m));
  fit_cmd->add_option("--method", fit.methods, "Methods to run (repeat or comma-separate)")
      ->delimiter(',')
      ->check(CLI::IsMember(method_names));
  fit_cmd->add_option("--m", fit.m, "Numerator degree")->capture_default_str();
  fit_cmd->add_option("--n", fit.n, "Denominator degree")->capture_default_str();
  fit_cmd->add_option("--k", fit.k, "Polynomial degree")->capture_default_str();
  fit_cmd->add_option("--lr", fit.lr, "Learning rate (gd)")->capture_default_str();
  fit_cmd->add_option("--epochs", fit.epochs, "Maximum epochs")->capture_default_str();
  fit_cmd->add_option("--optimizer", fit.optimizer, "Refinement: lm or gd")
      ->check(CLI::IsMember({"lm", "gd"}))
      ->capture_default_str();
  fit_cmd->add_option("--ls-solver", fit.ls_solver, "Least squares: qr or normal")
      ->check(CLI::IsMember({"qr", "normal"}))
      ->capture_default_str();
  fit_cmd->add_option("--seed", fit.seed, "Seed of the synthetic graph")->capture_default_str();
  fit_cmd->add_option("--repeats", fit.repeats, "Runs over consecutive seeds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  fit_cmd->add_option("--threads", fit.threads, "Worker threads (0: all cores)")
      ->capture_default_str();
  fit_cmd->add_option("--out-dir", fit.out_dir, "Write reports here");
  fit_cmd->add_option("--cache-dir", fit.cache_dir, "Eigendecomposition cache directory");
  fit_cmd->add_flag("--timing", fit.timing, "Record wall-clock seconds in the outputs");

  TheoryOptions theory;
  auto* theory_cmd = app.add_subcommand("theory", "Newman bound and rate experiments on |x|");
  theory_cmd->add_option("--kind", theory.kind, "newman or rates")
      ->check(CLI::IsMember({"newman", "rates"}))
      ->capture_default_str();
  theory_cmd->add_option("--degrees", theory.degrees, "first:last:step or a comma list (>= 5)")
      ->capture_default_str()
      ->check([](const std::string& s) {
        try {
          parse_degrees(s);
        } catch (const std::invalid_argument& e) {
          return std::string(e.what());
        }
        return std::string();
      });
  theory_cmd->add_option("--grid", theory.grid, "Grid points")
      ->check(CLI::Range(std::size_t{10000}, std::size_t{100000000}))
      ->capture_default_str();
  theory_cmd->add_option("--c", theory.c, "Interval half-width for newman")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  theory_cmd->add_option("--threads", theory.threads, "Worker threads (0: all cores)")
      ->capture_default_str();
  theory_cmd->add_option("--out", theory.out, "CSV output (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (gen_cmd->parsed()) return run_gen(gen);
    if (fit_cmd->parsed()) return run_fit(fit, *fit_cmd);
    return run_theory(theory);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return e.code() == ErrorCode::kParse || e.code() == ErrorCode::kInvalidParameter
               ? kExitUsage
               : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
