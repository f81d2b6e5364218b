#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "leakloc/generators.hpp"
#include "leakloc/network.hpp"

namespace leakloc::testing {

inline std::string data_path(const std::string& name) { return std::string(LEAKLOC_TEST_DATA) + "/" + name; }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Connected graph on n nodes: random tree plus extra edges with prob p,
/// integer weights in [wmin, wmax], unit-demand supply at node 1.
inline Network random_weighted_graph(Rng& rng, std::size_t n, double p, int wmin = 1, int wmax = 5) {
  Network base = random_connected_graph(n, p, rng.next());
  std::vector<Edge> edges(base.edges().begin(), base.edges().end());
  for (Edge& e : edges) e.query_cost = static_cast<double>(rng.between(wmin, wmax));
  return Network(std::vector<Node>(base.nodes().begin(), base.nodes().end()), std::move(edges));
}

/// Possibly disconnected graph: every pair independently with prob p.
inline Network random_graph(Rng& rng, std::size_t n, double p) {
  std::vector<Node> nodes(n);
  for (std::size_t k = 0; k < n; ++k) nodes[k].id = static_cast<NodeId>(k + 1);
  std::vector<Edge> edges;
  for (std::size_t a = 1; a <= n; ++a)
    for (std::size_t b = a + 1; b <= n; ++b)
      if (rng.uniform() < p) {
        Edge e;
        e.id = static_cast<EdgeId>(edges.size() + 1);
        e.i = static_cast<NodeId>(a);
        e.j = static_cast<NodeId>(b);
        edges.push_back(e);
      }
  return Network(std::move(nodes), std::move(edges));
}

inline Network make_network(std::size_t n, const std::vector<std::pair<int, int>>& pairs,
                            const std::vector<double>& costs = {}) {
  std::vector<Node> nodes(n);
  for (std::size_t k = 0; k < n; ++k) nodes[k].id = static_cast<NodeId>(k + 1);
  std::vector<Edge> edges;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    Edge e;
    e.id = static_cast<EdgeId>(k + 1);
    e.i = pairs[k].first;
    e.j = pairs[k].second;
    if (!costs.empty()) e.query_cost = costs[k];
    edges.push_back(e);
  }
  return Network(std::move(nodes), std::move(edges));
}

inline Network star_graph(std::size_t leaves) {
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t k = 0; k < leaves; ++k) pairs.emplace_back(1, static_cast<int>(k + 2));
  return make_network(leaves + 1, pairs);
}

inline Network complete_graph(std::size_t n) {
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t a = 1; a <= n; ++a)
    for (std::size_t b = a + 1; b <= n; ++b) pairs.emplace_back(static_cast<int>(a), static_cast<int>(b));
  return make_network(n, pairs);
}

}  // namespace leakloc::testing
