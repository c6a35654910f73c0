#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "ratgraph/graph.hpp"
#include "ratgraph/linalg.hpp"

namespace testing_support {

inline std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double lo = -1.0,
                                         double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

// Erdos-Renyi style graph; a spanning path is added when `connected` is set.
inline ratgraph::Graph random_graph(std::size_t n, double p, std::mt19937_64& rng,
                                    bool connected = true) {
  std::bernoulli_distribution coin(p);
  std::vector<ratgraph::Edge> edges;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v)
      if ((connected && v == u + 1) || coin(rng)) edges.push_back({u, v});
  return ratgraph::Graph(n, std::move(edges));
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double norm(const std::vector<double>& a) {
  double s = 0.0;
  for (double x : a) s += x * x;
  return std::sqrt(s);
}

inline ratgraph::Graph complete_graph(std::size_t n) {
  std::vector<ratgraph::Edge> edges;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v) edges.push_back({u, v});
  return ratgraph::Graph(n, std::move(edges));
}

}  // namespace testing_support
