#include "leakloc/network.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "leakloc/error.hpp"

namespace leakloc {

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Source: return "source";
    case NodeKind::Demand: return "demand";
    case NodeKind::Transmission: return "transmission";
    case NodeKind::Artificial: return "artificial";
  }
  return "transmission";
}

NodeKind node_kind_from_string(std::string_view text) {
  if (text == "source") return NodeKind::Source;
  if (text == "demand") return NodeKind::Demand;
  if (text == "transmission") return NodeKind::Transmission;
  if (text == "artificial") return NodeKind::Artificial;
  throw ParseError("unknown node kind '" + std::string(text) + "'");
}

Network::Network(std::vector<Node> nodes, std::vector<Edge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  std::sort(nodes_.begin(), nodes_.end(),
            [](const Node& a, const Node& b) { return a.id < b.id; });
  std::sort(edges_.begin(), edges_.end(),
            [](const Edge& a, const Edge& b) { return a.id < b.id; });

  node_index_.reserve(nodes_.size());
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    if (!std::isfinite(nodes_[k].boundary_flow))
      throw InvalidNetwork("node " + std::to_string(nodes_[k].id) + ": non-finite boundary flow");
    if (!node_index_.emplace(nodes_[k].id, k).second)
      throw InvalidNetwork("duplicate node id " + std::to_string(nodes_[k].id));
  }

  adjacency_.assign(nodes_.size(), {});
  endpoints_.reserve(edges_.size());
  edge_index_.reserve(edges_.size());
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    Edge& e = edges_[k];
    const std::string tag = "edge " + std::to_string(e.id);
    if (!edge_index_.emplace(e.id, k).second) throw InvalidNetwork("duplicate edge id " + std::to_string(e.id));
    if (e.i == e.j) throw InvalidNetwork(tag + ": self-loop");
    if (!node_index_.contains(e.i) || !node_index_.contains(e.j))
      throw InvalidNetwork(tag + ": dangling endpoint " +
                           std::to_string(node_index_.contains(e.i) ? e.j : e.i));
    if (!(e.query_cost >= 0.0) || !std::isfinite(e.query_cost))
      throw InvalidNetwork(tag + ": query cost must be finite and nonnegative");
    if (e.has_sensor && !e.known_flow) throw InvalidNetwork(tag + ": sensor without known flow");
    if (e.known_flow && !std::isfinite(*e.known_flow)) throw InvalidNetwork(tag + ": non-finite known flow");
    if (e.i > e.j) {
      std::swap(e.i, e.j);
      if (e.known_flow) *e.known_flow = -*e.known_flow;
    }
    const std::size_t a = node_index_.at(e.i);
    const std::size_t b = node_index_.at(e.j);
    endpoints_.emplace_back(a, b);
    adjacency_[a].push_back({b, k});
    adjacency_[b].push_back({a, k});
  }
}

std::size_t Network::index_of(NodeId id) const {
  auto it = node_index_.find(id);
  if (it == node_index_.end()) throw InvalidNetwork("unknown node id " + std::to_string(id));
  return it->second;
}

std::size_t Network::edge_index_of(EdgeId id) const {
  auto it = edge_index_.find(id);
  if (it == edge_index_.end()) throw InvalidNetwork("unknown edge id " + std::to_string(id));
  return it->second;
}

std::vector<NodeId> Network::node_ids() const {
  std::vector<NodeId> ids;
  ids.reserve(nodes_.size());
  for (const Node& v : nodes_) ids.push_back(v.id);
  return ids;
}

EdgeId Network::max_edge_id() const { return edges_.empty() ? 0 : edges_.back().id; }

double Network::net_boundary_flow() const {
  double sum = 0.0;
  for (const Node& v : nodes_) sum += v.boundary_flow;
  return sum;
}

double Network::total_production() const {
  double sum = 0.0;
  for (const Node& v : nodes_)
    if (v.boundary_flow > 0.0) sum += v.boundary_flow;
  return sum;
}

Network subgraph(const Network& net, std::span<const NodeId> keep,
                 const std::map<NodeId, double>& boundary_injections) {
  std::unordered_set<NodeId> kept;
  kept.reserve(keep.size());
  for (NodeId id : keep) {
    if (!net.has_node(id)) throw InvalidNetwork("subgraph: node " + std::to_string(id) + " not in network");
    kept.insert(id);
  }
  for (const auto& [id, flow] : boundary_injections) {
    if (!kept.contains(id))
      throw InvalidNetwork("subgraph: injection at node " + std::to_string(id) + " outside kept set");
  }

  std::vector<Node> nodes;
  nodes.reserve(kept.size());
  for (const Node& v : net.nodes()) {
    if (!kept.contains(v.id)) continue;
    Node copy = v;
    if (auto it = boundary_injections.find(v.id); it != boundary_injections.end()) {
      copy.boundary_flow += it->second;
      if (copy.kind != NodeKind::Artificial) {
        if (copy.boundary_flow > 0.0) copy.kind = NodeKind::Source;
        else if (copy.boundary_flow < 0.0) copy.kind = NodeKind::Demand;
      }
    }
    nodes.push_back(std::move(copy));
  }
  std::vector<Edge> edges;
  for (const Edge& e : net.edges())
    if (kept.contains(e.i) && kept.contains(e.j)) edges.push_back(e);
  return Network(std::move(nodes), std::move(edges));
}

void require_kind_flow_consistency(const Network& net) {
  for (const Node& v : net.nodes()) {
    if ((v.kind == NodeKind::Transmission || v.kind == NodeKind::Artificial) && v.boundary_flow != 0.0)
      throw InvalidNetwork("node " + std::to_string(v.id) + ": " + std::string(to_string(v.kind)) +
                           " node with nonzero boundary flow");
  }
}

}  // namespace leakloc
