#include "ratgraph/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "ratgraph/error.hpp"

namespace ratgraph {
namespace {

Edge normalized(Edge e) { return e.u < e.v ? e : Edge{e.v, e.u}; }

void check_range(const Edge& e, std::size_t n) {
  if (e.u >= n || e.v >= n)
    throw Error(ErrorCode::kInvalidInput, "edge (" + std::to_string(e.u) + ", " +
                                              std::to_string(e.v) + ") outside [0, " +
                                              std::to_string(n) + ")");
}

// Floyd's algorithm: k distinct values from [0, pool).
std::vector<std::size_t> sample_distinct(std::size_t pool, std::size_t k, std::mt19937_64& rng) {
  std::set<std::size_t> chosen;
  for (std::size_t j = pool - k; j < pool; ++j) {
    std::uniform_int_distribution<std::size_t> pick(0, j);
    const std::size_t t = pick(rng);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  return {chosen.begin(), chosen.end()};
}

bool parse_size(std::string_view token, std::size_t& out) {
  const char* first = token.data();
  const char* last = first + token.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

}  // namespace

Graph::Graph(std::size_t num_vertices, std::vector<Edge> edges) : n_(num_vertices) {
  for (auto& e : edges) {
    check_range(e, n_);
    if (e.u == e.v)
      throw Error(ErrorCode::kInvalidInput, "self-loop at vertex " + std::to_string(e.u));
    e = normalized(e);
  }
  std::sort(edges.begin(), edges.end());
  if (auto dup = std::adjacent_find(edges.begin(), edges.end()); dup != edges.end())
    throw Error(ErrorCode::kInvalidInput, "duplicate edge (" + std::to_string(dup->u) + ", " +
                                              std::to_string(dup->v) + ")");
  edges_ = std::move(edges);
}

Graph Graph::from_edges_lenient(std::size_t num_vertices, std::vector<Edge> edges,
                                std::size_t* dropped) {
  const std::size_t before = edges.size();
  std::erase_if(edges, [&](const Edge& e) {
    check_range(e, num_vertices);
    return e.u == e.v;
  });
  for (auto& e : edges) e = normalized(e);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  if (dropped) *dropped = before - edges.size();
  return Graph(num_vertices, std::move(edges));
}

std::vector<std::size_t> Graph::degrees() const {
  std::vector<std::size_t> deg(n_, 0);
  for (const auto& e : edges_) {
    ++deg[e.u];
    ++deg[e.v];
  }
  return deg;
}

Matrix build_laplacian(const Graph& g) {
  Matrix l(g.num_vertices(), g.num_vertices());
  for (const auto& e : g.edges()) {
    l(e.u, e.v) -= 1.0;
    l(e.v, e.u) -= 1.0;
    l(e.u, e.u) += 1.0;
    l(e.v, e.v) += 1.0;
  }
  return l;
}

std::size_t connected_components(const Graph& g) {
  std::vector<std::size_t> parent(g.num_vertices());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t components = g.num_vertices();
  for (const auto& e : g.edges()) {
    const std::size_t a = find(e.u);
    const std::size_t b = find(e.v);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components;
}

Graph generate_block_graph(const BlockGraphParams& p) {
  if (p.num_groups == 0 || p.group_size == 0)
    throw Error(ErrorCode::kInvalidParameter, "block graph needs at least one non-empty group");
  if (p.group_size < 2 && p.intra_max > 0)
    throw Error(ErrorCode::kInvalidParameter,
                "group_size < 2 leaves no intra-group partners; set intra_max to 0");

  const std::size_t n = p.num_groups * p.group_size;
  std::mt19937_64 rng(p.seed);
  std::uniform_int_distribution<std::size_t> intra_count(0, p.intra_max);
  std::uniform_int_distribution<std::size_t> inter_count(0, p.inter_max);

  std::vector<Edge> edges;
  for (std::size_t v = 0; v < n; ++v) {
    const std::size_t group_begin = (v / p.group_size) * p.group_size;
    const std::size_t local = v - group_begin;

    const std::size_t k_in = std::min(intra_count(rng), p.group_size - 1);
    for (std::size_t idx : sample_distinct(p.group_size - 1, k_in, rng)) {
      const std::size_t partner = group_begin + (idx < local ? idx : idx + 1);
      edges.push_back({v, partner});
    }

    if (p.num_groups > 1) {
      const std::size_t outside = n - p.group_size;
      const std::size_t k_out = std::min(inter_count(rng), outside);
      for (std::size_t idx : sample_distinct(outside, k_out, rng)) {
        const std::size_t partner = idx < group_begin ? idx : idx + p.group_size;
        edges.push_back({v, partner});
      }
    }
  }
  return Graph::from_edges_lenient(n, std::move(edges));
}

EdgeListReadResult parse_edge_list(std::istream& in, std::string_view source_name) {
  std::vector<Edge> edges;
  std::size_t declared = 0;
  std::size_t max_id = 0;
  bool any_vertex = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (tokens[0].starts_with('#')) {
      // "# vertices N" or "#vertices N"
      std::vector<std::string_view> rest = tokens;
      if (rest[0] == "#") rest.erase(rest.begin());
      else rest[0].remove_prefix(1);
      std::size_t count = 0;
      if (rest.size() == 2 && rest[0] == "vertices" && parse_size(rest[1], count)) {
        declared = std::max(declared, count);
        any_vertex = any_vertex || count > 0;
      }
      continue;
    }
    Edge e;
    if (tokens.size() != 2 || !parse_size(tokens[0], e.u) || !parse_size(tokens[1], e.v))
      throw Error(ErrorCode::kParse, std::string(source_name) + ":" + std::to_string(line_no) +
                                         ": expected two non-negative integers, got '" + line +
                                         "'");
    max_id = std::max({max_id, e.u, e.v});
    any_vertex = true;
    edges.push_back(e);
  }
  if (in.bad()) throw Error(ErrorCode::kIo, "read failure on " + std::string(source_name));
  if (!any_vertex) throw Error(ErrorCode::kInvalidInput, std::string(source_name) + ": empty graph");

  const std::size_t n = std::max(declared, edges.empty() ? std::size_t{0} : max_id + 1);
  EdgeListReadResult result;
  result.graph = Graph::from_edges_lenient(n, std::move(edges), &result.dropped);
  return result;
}

EdgeListReadResult read_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open edge list '" + path.string() + "'");
  return parse_edge_list(in, path.string());
}

void write_edge_list(const Graph& g, std::ostream& out) {
  out << "# vertices " << g.num_vertices() << '\n';
  for (const auto& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

void write_edge_list(const Graph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  write_edge_list(g, out);
  if (!out) throw Error(ErrorCode::kIo, "write failure on '" + path.string() + "'");
}

std::uint64_t graph_content_hash(const Graph& g) {
  std::ostringstream text;
  write_edge_list(g, text);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text.str()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace ratgraph
