#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "ratgraph/linalg.hpp"

namespace ratgraph {

struct Edge {
  std::size_t u = 0;
  std::size_t v = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Undirected, unweighted simple graph on vertices [0, n). Edges are stored
// once with u < v, sorted.
class Graph {
 public:
  Graph() = default;

  // Throws Error(kInvalidInput) on self-loops, duplicate edges (in either
  // orientation) or endpoints outside [0, n).
  Graph(std::size_t num_vertices, std::vector<Edge> edges);

  // Normalizes and deduplicates; self-loops and duplicates are counted in
  // `dropped` instead of rejected. Out-of-range endpoints still throw.
  static Graph from_edges_lenient(std::size_t num_vertices, std::vector<Edge> edges,
                                  std::size_t* dropped = nullptr);

  std::size_t num_vertices() const noexcept { return n_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  std::span<const Edge> edges() const noexcept { return edges_; }

  std::vector<std::size_t> degrees() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
};

// L = D - W as a dense matrix.
Matrix build_laplacian(const Graph& g);

std::size_t connected_components(const Graph& g);

struct BlockGraphParams {
  std::size_t num_groups = 1;
  std::size_t group_size = 2;
  std::size_t intra_max = 8;
  std::size_t inter_max = 3;
  std::uint64_t seed = 0;
};

// Vertices are split into consecutive groups. Each vertex draws an intra-group
// count uniformly from [0, intra_max] and picks that many distinct partners in
// its own group, then an inter-group count from [0, inter_max] with partners
// outside the group. Counts are clamped to the available partners; repeated
// pairs collapse into one edge.
Graph generate_block_graph(const BlockGraphParams& params);

struct EdgeListReadResult {
  Graph graph;
  std::size_t dropped = 0;  // self-loops plus duplicate edges
};

// Two whitespace-separated vertex ids per line; blank lines and lines starting
// with '#' are ignored, except "# vertices N" which pads the vertex count so
// trailing isolated vertices survive a write/read cycle.
EdgeListReadResult parse_edge_list(std::istream& in, std::string_view source_name);
EdgeListReadResult read_edge_list(const std::filesystem::path& path);

void write_edge_list(const Graph& g, std::ostream& out);
void write_edge_list(const Graph& g, const std::filesystem::path& path);

// FNV-1a over the canonical edge-list text; used as the eigensystem cache key.
std::uint64_t graph_content_hash(const Graph& g);

}  // namespace ratgraph
