#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "ratgraph/error.hpp"
#include "ratgraph/graph.hpp"
#include "support.hpp"

using namespace ratgraph;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected ratgraph::Error");
  return ErrorCode::kInvalidInput;
}

EdgeListReadResult parse(const std::string& text) {
  std::istringstream in(text);
  return parse_edge_list(in, "<mem>");
}

}  // namespace

TEST_CASE("laplacian of a single edge") {
  Matrix l = build_laplacian(Graph(2, {{0, 1}}));
  CHECK(l(0, 0) == 1);
  CHECK(l(0, 1) == -1);
  CHECK(l(1, 0) == -1);
  CHECK(l(1, 1) == 1);
}

TEST_CASE("laplacian of an edgeless graph is zero") {
  Matrix l = build_laplacian(Graph(3, {}));
  CHECK(max_abs(l) == 0.0);
}

TEST_CASE("laplacian of K4") {
  Matrix l = build_laplacian(testing_support::complete_graph(4));
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(l(i, j) == (i == j ? 3.0 : -1.0));
}

TEST_CASE("graph constructor rejects invalid edge sets") {
  CHECK(code_of([] { Graph(3, {{1, 1}}); }) == ErrorCode::kInvalidInput);
  CHECK(code_of([] { Graph(3, {{0, 1}, {1, 0}}); }) == ErrorCode::kInvalidInput);
  CHECK(code_of([] { Graph(3, {{0, 3}}); }) == ErrorCode::kInvalidInput);
}

TEST_CASE("laplacian structure holds on generated graphs") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Graph g = generate_block_graph({.num_groups = 3, .group_size = 20, .seed = seed});
    Matrix l = build_laplacian(g);
    auto deg = g.degrees();
    for (std::size_t i = 0; i < g.num_vertices(); ++i) {
      double row_sum = 0.0;
      for (std::size_t j = 0; j < g.num_vertices(); ++j) {
        row_sum += l(i, j);
        CHECK(l(i, j) == l(j, i));
        if (i != j) CHECK((l(i, j) == 0.0 || l(i, j) == -1.0));
      }
      CHECK(row_sum == 0.0);
      CHECK(l(i, i) == static_cast<double>(deg[i]));
    }
  }
}

TEST_CASE("block graph generation") {
  SUBCASE("500-node single group respects the degree budget") {
    Graph g = generate_block_graph({.num_groups = 1, .group_size = 500, .seed = 4});
    CHECK(g.num_vertices() == 500);
    // Each vertex proposes at most 8 partners; it can also be chosen by others,
    // so only the proposal side is bounded. The mean degree stays near 8.
    double mean = 0.0;
    for (auto d : g.degrees()) mean += static_cast<double>(d);
    mean /= 500.0;
    CHECK(mean <= 8.0);
    CHECK(mean > 4.0);
  }
  SUBCASE("zero budget yields an edgeless graph") {
    Graph g = generate_block_graph(
        {.num_groups = 2, .group_size = 2, .intra_max = 0, .inter_max = 0, .seed = 9});
    CHECK(g.num_vertices() == 4);
    CHECK(g.num_edges() == 0);
  }
  SUBCASE("deterministic given seed") {
    BlockGraphParams p{.num_groups = 5, .group_size = 100, .seed = 7};
    CHECK(generate_block_graph(p) == generate_block_graph(p));
    BlockGraphParams q = p;
    q.seed = 8;
    CHECK_FALSE(generate_block_graph(p) == generate_block_graph(q));
  }
  SUBCASE("inter-group edges only when several groups exist") {
    Graph g = generate_block_graph(
        {.num_groups = 4, .group_size = 10, .intra_max = 0, .inter_max = 3, .seed = 1});
    for (const auto& e : g.edges()) CHECK(e.u / 10 != e.v / 10);
  }
  SUBCASE("invalid parameters") {
    CHECK(code_of([] { generate_block_graph({.num_groups = 2, .group_size = 1}); }) ==
          ErrorCode::kInvalidParameter);
    CHECK(code_of([] { generate_block_graph({.num_groups = 0}); }) ==
          ErrorCode::kInvalidParameter);
    CHECK_NOTHROW(generate_block_graph(
        {.num_groups = 3, .group_size = 1, .intra_max = 0, .inter_max = 1, .seed = 2}));
  }
}

TEST_CASE("edge list parsing") {
  SUBCASE("path graph") {
    auto r = parse("0 1\n1 2");
    CHECK(r.graph.num_vertices() == 3);
    CHECK(r.graph.num_edges() == 2);
    CHECK(r.dropped == 0);
  }
  SUBCASE("self-loop dropped with a warning count") {
    auto r = parse("# comment\n0 1\n2 2\n\n");
    CHECK(r.graph.num_vertices() == 3);
    CHECK(r.graph.num_edges() == 1);
    CHECK(r.dropped == 1);
  }
  SUBCASE("duplicates in either orientation collapse") {
    auto r = parse("0 1\n1 0\n0 1\n");
    CHECK(r.graph.num_edges() == 1);
    CHECK(r.dropped == 2);
  }
  SUBCASE("malformed line reports its number") {
    try {
      parse("0 1\n1 x\n");
      FAIL("expected parse error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kParse);
      CHECK(std::string(e.what()).find(":2:") != std::string::npos);
    }
    CHECK(code_of([] { parse("0 1 2\n"); }) == ErrorCode::kParse);
    CHECK(code_of([] { parse("-1 2\n"); }) == ErrorCode::kParse);
  }
  SUBCASE("empty graph rejected") {
    CHECK(code_of([] { parse(""); }) == ErrorCode::kInvalidInput);
    CHECK(code_of([] { parse("# only comments\n"); }) == ErrorCode::kInvalidInput);
  }
  SUBCASE("missing file") {
    CHECK(code_of([] { read_edge_list("/nonexistent/graph.txt"); }) == ErrorCode::kIo);
  }
}

TEST_CASE("edge list write/read round trip keeps isolated vertices") {
  Graph g = generate_block_graph({.num_groups = 2, .group_size = 15, .seed = 3});
  Graph with_tail(g.num_vertices() + 3,
                  std::vector<Edge>(g.edges().begin(), g.edges().end()));
  const auto path = std::filesystem::temp_directory_path() / "ratgraph_roundtrip_edges.txt";
  write_edge_list(with_tail, path);
  auto back = read_edge_list(path);
  CHECK(back.graph == with_tail);
  CHECK(back.dropped == 0);
  CHECK(graph_content_hash(back.graph) == graph_content_hash(with_tail));
  std::filesystem::remove(path);
}

TEST_CASE("connected components") {
  CHECK(connected_components(Graph(4, {})) == 4);
  CHECK(connected_components(Graph(4, {{0, 1}, {2, 3}})) == 2);
  CHECK(connected_components(testing_support::complete_graph(5)) == 1);
}
