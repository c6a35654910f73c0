#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "doctest.h"
#include "ratgraph/error.hpp"
#include "ratgraph/experiments.hpp"

using namespace ratgraph;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("ratgraph-exp-" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Relative path -> contents for every regular file under dir.
std::map<std::string, std::string> tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = slurp(e.path());
  return out;
}

ExperimentSpec small_spec() {
  ExperimentSpec s;
  s.graph.synthetic = {.num_groups = 2, .group_size = 40};
  s.methods = all_methods();
  s.m = 3;
  s.n = 3;
  s.k = 6;
  s.train.max_epochs = 200;
  s.seed = 4;
  return s;
}

}  // namespace

TEST_CASE("targets on normalized eigenvalues") {
  EigenSystem es({0.0, 1.0, 2.0}, Matrix::identity(3));
  auto abs_t = make_target(es, parse_target("abs"));
  CHECK(abs_t.spectral.ys == std::vector<double>{0.5, 0.0, 0.5});
  CHECK(abs_t.vertex_truth == abs_t.spectral.ys);  // U = I
  auto sign_t = make_target(es, parse_target("sign"));
  CHECK(sign_t.spectral.ys == std::vector<double>{-1.0, 0.0, 1.0});
  CHECK_THROWS_AS(parse_target("lowpass"), Error);

  Graph g = generate_block_graph({.num_groups = 3, .group_size = 30, .seed = 2});
  const Matrix lap = build_laplacian(g);
  auto real = decompose(lap);
  auto hp = make_target(real, parse_target("highpass"));
  std::size_t ones = 0, above = 0;
  for (std::size_t d = 0; d < hp.spectral.size(); ++d) {
    CHECK((hp.spectral.ys[d] == 0.0 || hp.spectral.ys[d] == 1.0));
    ones += hp.spectral.ys[d] == 1.0;
    above += hp.spectral.ts[d] > 0.5;
  }
  CHECK(ones == above);
  // x^T L x of U y equals sum_d lambda_d y_d^2.
  double expected = 0.0;
  for (std::size_t d = 0; d < real.size(); ++d)
    expected += real.lambdas()[d] * hp.spectral.ys[d] * hp.spectral.ys[d];
  CHECK(dirichlet_energy(lap, hp.vertex_truth) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("every method runs and spectral / vertex errors agree") {
  ExperimentSpec spec = small_spec();
  auto res = run_experiment(spec);
  REQUIRE(res.runs.size() == 1);
  const auto& reports = res.runs[0].reports;
  REQUIRE(reports.size() == spec.methods.size());
  CHECK(res.all_ok());
  for (std::size_t i = 0; i < reports.size(); ++i) {
    CAPTURE(reports[i].method);
    CHECK(reports[i].method == to_string(spec.methods[i]));
    CHECK(reports[i].ok());
    CHECK(reports[i].spectral_mse >= 0.0);
    CHECK(std::abs(reports[i].spectral_mse - reports[i].vertex_mse) <=
          1e-6 * std::max(reports[i].spectral_mse, 1e-300));
    CHECK(reports[i].seconds == 0.0);
  }
  auto find = [&](const char* name) -> const FitReport& {
    for (const auto& r : reports)
      if (r.method == name) return r;
    FAIL("missing method");
    return reports[0];
  };
  CHECK(find("rational-remez").spectral_mse <= find("remez").spectral_mse);
  CHECK(find("poly-ls").spectral_mse == doctest::Approx(find("cheb-ls").spectral_mse).epsilon(1e-6));
  CHECK(find("poly-ls").spectral_mse <= find("linear").spectral_mse);
  CHECK(find("rational-remez").epochs > 0);
  CHECK(find("rational-remez").trace.size() == find("rational-remez").epochs + 1);
  CHECK(res.summary.size() == spec.methods.size());
  CHECK(res.summary[0].runs == 1);
}

TEST_CASE("a failing method does not stop the others") {
  fs::path dir = fresh_dir("isolation");
  fs::create_directories(dir);
  {
    std::ofstream g(dir / "tiny.txt");
    g << "0 1\n1 2\n2 3\n3 4\n";
  }
  ExperimentSpec spec;
  spec.graph.edge_list = dir / "tiny.txt";
  spec.methods = {Method::kPolyLs, Method::kLinear};
  spec.k = 10;  // 5 eigenvalues cannot determine 11 coefficients
  auto res = run_experiment(spec);
  const auto& reports = res.runs[0].reports;
  CHECK(!reports[0].ok());
  CHECK(reports[0].error.rfind("poly-ls: ", 0) == 0);
  CHECK(reports[1].ok());
  CHECK(!res.all_ok());
  std::ostringstream csv;
  write_results_csv(reports, csv);
  CHECK(csv.str().find("poly-ls,0,0,10,nan,nan,0,0\n") != std::string::npos);
}

TEST_CASE("outputs are byte-identical across reruns and thread counts") {
  ExperimentSpec spec = small_spec();
  const fs::path da = fresh_dir("det-a"), db = fresh_dir("det-b");
  spec.out_dir = da;
  run_experiment(spec);
  spec.out_dir = db;
  spec.threads = 3;
  run_experiment(spec);
  auto a = tree(da);
  auto b = tree(db);
  CHECK(a.size() >= 10);
  CHECK(a.count("results.csv") == 1);
  CHECK(a.count("rational-remez.trace.csv") == 1);
  CHECK(a.count("remez_orders.json") == 1);
  CHECK(a == b);
}

TEST_CASE("eigensystem cache is reused and gives identical results") {
  ExperimentSpec spec = small_spec();
  spec.methods = {Method::kRationalRemez, Method::kPolyLs};
  spec.cache_dir = fresh_dir("cache");
  auto first = run_experiment(spec);
  const std::string key = first.runs[0].graph.cache_key;
  CHECK(fs::exists(*spec.cache_dir / (key + ".lambdas.csv")));
  auto second = run_experiment(spec);
  for (std::size_t i = 0; i < first.runs[0].reports.size(); ++i)
    CHECK(to_json(first.runs[0].reports[i]).dump() == to_json(second.runs[0].reports[i]).dump());
}

TEST_CASE("repeats aggregate over consecutive seeds") {
  ExperimentSpec spec = small_spec();
  spec.methods = {Method::kPolyLs};
  spec.repeats = 3;
  spec.out_dir = fresh_dir("repeats");
  auto res = run_experiment(spec);
  REQUIRE(res.runs.size() == 3);
  CHECK(res.runs[2].seed == spec.seed + 2);
  CHECK(res.summary[0].runs == 3);
  CHECK(res.summary[0].s_err_std > 0.0);
  CHECK(fs::exists(*spec.out_dir / "seed-5" / "results.csv"));
  CHECK(slurp(*spec.out_dir / "summary.csv").rfind("method,runs,", 0) == 0);
}

TEST_CASE("config parsing") {
  auto j = nlohmann::json::parse(R"({
    "graph": {"groups": 3, "group_size": 20},
    "target": {"a": 1, "b": 0.5, "sigma": 0},
    "methods": ["remez", "poly-gd"],
    "m": 2, "n": 1, "k": 4,
    "train": {"method": "gd", "learning_rate": 0.01, "max_epochs": 10},
    "seed": 9
  })");
  ExperimentSpec s = spec_from_json(j);
  CHECK(s.graph.synthetic.num_groups == 3);
  CHECK(s.target.kind == TargetKind::kJump);
  CHECK(s.target.jump.shift == 0.5);
  CHECK(s.methods == std::vector<Method>{Method::kRemez, Method::kPolyGd});
  CHECK(s.train.method == TrainMethod::kGradientDescent);
  CHECK(s.train.max_epochs == 10);
  CHECK(s.seed == 9);
  CHECK(spec_from_json(to_json(s)).methods == s.methods);
  CHECK(to_json(spec_from_json(to_json(s))) == to_json(s));

  for (const char* bad : {R"({"colour": 1})", R"({"methods": ["adam"]})", R"({"m": -1})",
                          R"({"target": "lowpass"})", R"({"train": {"momentum": 0.9}})"}) {
    CAPTURE(bad);
    try {
      spec_from_json(nlohmann::json::parse(bad));
      FAIL("expected parse error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kParse);
    }
  }
  ExperimentSpec empty;
  empty.methods.clear();
  CHECK_THROWS_AS(empty.validate(), Error);
}
