#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace leakloc {

using NodeId = int;
using EdgeId = int;

enum class NodeKind { Source, Demand, Transmission, Artificial };

std::string_view to_string(NodeKind kind);
NodeKind node_kind_from_string(std::string_view text);

struct Node {
  NodeId id = 0;
  NodeKind kind = NodeKind::Transmission;
  // Positive feeds the network, negative is consumption. Flow units.
  double boundary_flow = 0.0;
  std::string label;
  std::optional<double> x;
  std::optional<double> y;

  bool operator==(const Node&) const = default;
};

// Positive flow runs from i to j; construction guarantees i < j.
struct Edge {
  EdgeId id = 0;
  NodeId i = 0;
  NodeId j = 0;
  double query_cost = 1.0;
  bool has_sensor = false;
  bool has_valve = false;
  std::optional<double> known_flow;
  std::string label;

  bool operator==(const Edge&) const = default;
};

/// Undirected flow network with a fixed sign convention per edge.
///
/// Nodes are kept sorted by id and addressed internally by their dense rank
/// 0..n-1, so the i < j convention on ids coincides with the convention on
/// dense indices. Immutable once constructed.
class Network {
 public:
  struct Incident {
    std::size_t neighbor;
    std::size_t edge;
  };

  Network() = default;

  /// Validates and normalizes. Edges given with i > j are flipped and their
  /// known_flow negated. Throws InvalidNetwork on duplicate ids, self-loops,
  /// dangling endpoints, negative or non-finite costs, or a sensor without a
  /// known flow.
  Network(std::vector<Node> nodes, std::vector<Edge> edges);

  std::size_t n() const noexcept { return nodes_.size(); }
  std::size_t m() const noexcept { return edges_.size(); }

  std::span<const Node> nodes() const noexcept { return nodes_; }
  std::span<const Edge> edges() const noexcept { return edges_; }

  bool has_node(NodeId id) const { return node_index_.contains(id); }
  bool has_edge(EdgeId id) const { return edge_index_.contains(id); }
  std::size_t index_of(NodeId id) const;
  std::size_t edge_index_of(EdgeId id) const;
  const Node& node(NodeId id) const { return nodes_[index_of(id)]; }
  const Edge& edge(EdgeId id) const { return edges_[edge_index_of(id)]; }

  std::span<const Incident> incident(std::size_t node_index) const {
    return adjacency_[node_index];
  }
  std::size_t degree(std::size_t node_index) const { return adjacency_[node_index].size(); }
  std::pair<std::size_t, std::size_t> endpoints(std::size_t edge_index) const {
    return endpoints_[edge_index];
  }

  std::vector<NodeId> node_ids() const;
  NodeId max_node_id() const { return nodes_.empty() ? 0 : nodes_.back().id; }
  EdgeId max_edge_id() const;

  /// Sum of boundary flows: production minus consumption.
  double net_boundary_flow() const;
  double total_production() const;

  bool operator==(const Network& other) const {
    return nodes_ == other.nodes_ && edges_ == other.edges_;
  }

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::unordered_map<NodeId, std::size_t> node_index_;
  std::unordered_map<EdgeId, std::size_t> edge_index_;
  std::vector<std::vector<Incident>> adjacency_;
  std::vector<std::pair<std::size_t, std::size_t>> endpoints_;
};

/// Induced subgraph on `keep`. Each injection is added to that node's
/// boundary flow; a transmission node that ends up with a nonzero boundary
/// flow is reclassified as source or demand by sign. Artificial nodes keep
/// their kind since they stand for a measurement point.
Network subgraph(const Network& net, std::span<const NodeId> keep,
                 const std::map<NodeId, double>& boundary_injections = {});

/// Throws InvalidNetwork if a transmission or artificial node carries a
/// boundary flow. Applied to user-supplied networks.
void require_kind_flow_consistency(const Network& net);

}  // namespace leakloc
