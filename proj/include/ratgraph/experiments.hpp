#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "ratgraph/graph.hpp"
#include "ratgraph/optimizer.hpp"
#include "ratgraph/remez.hpp"
#include "ratgraph/spectral.hpp"
#include "ratgraph/theory.hpp"

namespace ratgraph {

enum class TargetKind { kAbs, kSign, kHighpass, kJump };

// abs: |t - 0.5|, sign: sign(t - 0.5), highpass: (sign(t - 0.5) + 1) / 2,
// jump: any member of the jump family, on normalized eigenvalues t.
struct TargetSpec {
  TargetKind kind = TargetKind::kAbs;
  JumpTarget jump;  // kJump only

  std::string name() const;
};

// "abs", "sign" or "highpass"; anything else is Error(kInvalidParameter).
TargetSpec parse_target(std::string_view name);
double eval_target(const TargetSpec& target, double t);

struct ExperimentTarget {
  DiscreteTarget spectral;           // y_hat_d = g(t_d)
  std::vector<double> vertex_truth;  // U y_hat
};

ExperimentTarget make_target(const EigenSystem& es, const TargetSpec& target);

enum class Method {
  kRationalRemez,    // Remez traversal, padded to (m, n), then refined
  kRationalNoRemez,  // refinement from psi = 1e-2, phi = 0
  kRemez,            // best Remez cell, no refinement
  kPolyLs,           // degree-k monomial least squares
  kChebLs,           // degree-k Chebyshev least squares in 2t - 1
  kPolyGd,           // degree-k monomial polynomial refined from zero
  kLinear,           // least-squares line
};
std::string_view to_string(Method method);
Method parse_method(std::string_view name);
std::vector<Method> all_methods();

struct GraphSource {
  std::optional<std::filesystem::path> edge_list;
  BlockGraphParams synthetic{.num_groups = 5, .group_size = 100};  // seed comes from the spec
};

struct ExperimentSpec {
  GraphSource graph;
  TargetSpec target;
  std::vector<Method> methods{Method::kRationalRemez, Method::kPolyLs};
  std::size_t m = 5;
  std::size_t n = 5;
  std::size_t k = 10;
  TrainConfig train;
  LeastSquaresSolver ls_solver = LeastSquaresSolver::kQr;
  std::uint64_t seed = 0;
  std::size_t repeats = 1;  // synthetic graphs use seeds seed, seed + 1, ...
  unsigned threads = 1;     // 0: hardware concurrency
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::filesystem::path> cache_dir;
  bool timing = false;  // write wall-clock seconds; otherwise 0 keeps outputs reproducible

  // Throws Error(kInvalidParameter).
  void validate() const;
};

// Strict: unknown keys or wrongly typed values throw Error(kParse).
ExperimentSpec spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentSpec& spec);
ExperimentSpec load_spec(const std::filesystem::path& path);

struct GraphSummary {
  std::size_t vertices = 0;
  std::size_t edges = 0;
  std::size_t dropped_edges = 0;
  std::size_t components = 0;
  double lambda_max = 0.0;
  double truth_energy = 0.0;  // Dirichlet energy of the vertex truth
  std::string cache_key;
};

struct RunResult {
  std::uint64_t seed = 0;
  GraphSummary graph;
  std::vector<FitReport> reports;  // in spec.methods order
  std::optional<TraversalResult> remez;
};

struct MethodSummary {
  std::string method;
  std::size_t runs = 0;  // successful runs
  double s_err_mean = 0.0;
  double s_err_std = 0.0;
  double v_err_mean = 0.0;
  double v_err_std = 0.0;
};

struct ExperimentResult {
  std::vector<RunResult> runs;
  std::vector<MethodSummary> summary;

  bool all_ok() const;
};

// Builds or loads the graph, decomposes it (through the cache when configured),
// fits every method and writes outputs when spec.out_dir is set. A failing
// method is recorded in its report and does not stop the others.
ExperimentResult run_experiment(const ExperimentSpec& spec);

// results.csv: method,m,n,k,s_err,v_err,epochs,seconds
void write_results_csv(std::span<const FitReport> reports, std::ostream& out);
void write_summary_csv(std::span<const MethodSummary> summary, std::ostream& out);

// Vertex-domain MSE of U (y_pred) against the truth.
double vertex_mse(const EigenSystem& es, std::span<const double> spectral_prediction,
                  std::span<const double> vertex_truth);

}  // namespace ratgraph
