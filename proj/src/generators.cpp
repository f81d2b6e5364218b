#include "leakloc/generators.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "leakloc/error.hpp"

namespace leakloc {

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::size_t Rng::below(std::size_t bound) {
  if (bound == 0) throw std::invalid_argument("Rng::below(0)");
  const auto k = static_cast<std::size_t>(uniform() * static_cast<double>(bound));
  return k < bound ? k : bound - 1;
}

long long Rng::between(long long lo, long long hi) {
  return lo + static_cast<long long>(below(static_cast<std::size_t>(hi - lo + 1)));
}

namespace {

std::vector<Node> supplied_nodes(std::size_t n) {
  std::vector<Node> nodes(n);
  for (std::size_t k = 0; k < n; ++k) {
    nodes[k].id = static_cast<NodeId>(k + 1);
    nodes[k].kind = k == 0 ? NodeKind::Source : NodeKind::Demand;
    nodes[k].boundary_flow = k == 0 ? static_cast<double>(n - 1) : -1.0;
  }
  if (n == 1) nodes[0].kind = NodeKind::Transmission;
  return nodes;
}

void add_edge(std::vector<Edge>& edges, std::size_t a, std::size_t b) {
  Edge e;
  e.id = static_cast<EdgeId>(edges.size() + 1);
  e.i = static_cast<NodeId>(a);
  e.j = static_cast<NodeId>(b);
  edges.push_back(e);
}

}  // namespace

Network path_graph(std::size_t n) {
  if (n < 1) throw InvalidNetwork("path needs at least one node");
  std::vector<Edge> edges;
  for (std::size_t k = 1; k < n; ++k) add_edge(edges, k, k + 1);
  return Network(supplied_nodes(n), std::move(edges));
}

Network cycle_graph(std::size_t n) {
  if (n < 3) throw InvalidNetwork("cycle needs at least three nodes");
  std::vector<Edge> edges;
  for (std::size_t k = 1; k < n; ++k) add_edge(edges, k, k + 1);
  add_edge(edges, 1, n);
  return Network(supplied_nodes(n), std::move(edges));
}

Network grid_graph(std::size_t rows, std::size_t cols) {
  if (rows < 1 || cols < 1) throw InvalidNetwork("grid needs positive dimensions");
  auto id = [cols](std::size_t r, std::size_t c) { return r * cols + c + 1; };
  std::vector<Node> nodes = supplied_nodes(rows * cols);
  std::vector<Edge> edges;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      nodes[id(r, c) - 1].x = static_cast<double>(c);
      nodes[id(r, c) - 1].y = static_cast<double>(r);
      if (c + 1 < cols) add_edge(edges, id(r, c), id(r, c + 1));
      if (r + 1 < rows) add_edge(edges, id(r, c), id(r + 1, c));
    }
  }
  return Network(std::move(nodes), std::move(edges));
}

Network random_connected_graph(std::size_t n, double p, std::uint64_t seed) {
  if (n < 1) throw InvalidNetwork("random graph needs at least one node");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidNetwork("edge probability must lie in [0, 1]");
  Rng rng(seed);
  std::vector<std::vector<char>> linked(n + 1, std::vector<char>(n + 1, 0));
  std::vector<Edge> edges;
  for (std::size_t v = 2; v <= n; ++v) {
    const std::size_t u = 1 + rng.below(v - 1);
    add_edge(edges, u, v);
    linked[u][v] = 1;
  }
  for (std::size_t a = 1; a <= n; ++a)
    for (std::size_t b = a + 1; b <= n; ++b)
      if (!linked[a][b] && rng.uniform() < p) add_edge(edges, a, b);
  return Network(supplied_nodes(n), std::move(edges));
}

Network lollipop_graph(std::size_t clique, std::size_t tail) {
  if (clique < 2) throw InvalidNetwork("lollipop clique needs at least two nodes");
  std::vector<Edge> edges;
  for (std::size_t a = 1; a <= clique; ++a)
    for (std::size_t b = a + 1; b <= clique; ++b) add_edge(edges, a, b);
  for (std::size_t k = 0; k < tail; ++k) add_edge(edges, clique + k, clique + k + 1);
  return Network(supplied_nodes(clique + tail), std::move(edges));
}

namespace {

std::vector<std::string> split_spec(std::string_view spec, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : spec) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

std::size_t spec_size(const std::string& text) {
  std::size_t pos = 0;
  unsigned long value = 0;
  try {
    value = std::stoul(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != text.size()) throw InvalidNetwork("bad graph size '" + text + "'");
  return value;
}

}  // namespace

Network generate_graph(std::string_view spec, std::uint64_t seed) {
  const auto parts = split_spec(spec, ':');
  const std::string& kind = parts[0];
  auto need = [&](std::size_t k) {
    if (parts.size() != k + 1) throw InvalidNetwork("graph spec '" + std::string(spec) + "' needs " + std::to_string(k) + " parameter(s)");
  };
  if (kind == "path") {
    need(1);
    return path_graph(spec_size(parts[1]));
  }
  if (kind == "cycle") {
    need(1);
    return cycle_graph(spec_size(parts[1]));
  }
  if (kind == "grid") {
    need(1);
    const auto dims = split_spec(parts[1], 'x');
    if (dims.size() != 2) throw InvalidNetwork("grid spec needs RxC");
    return grid_graph(spec_size(dims[0]), spec_size(dims[1]));
  }
  if (kind == "random-connected") {
    need(2);
    double p = 0.0;
    try {
      p = std::stod(parts[2]);
    } catch (const std::exception&) {
      throw InvalidNetwork("bad edge probability '" + parts[2] + "'");
    }
    return random_connected_graph(spec_size(parts[1]), p, seed);
  }
  if (kind == "lollipop") {
    need(2);
    return lollipop_graph(spec_size(parts[1]), spec_size(parts[2]));
  }
  throw InvalidNetwork("unknown graph kind '" + kind + "'");
}

}  // namespace leakloc
