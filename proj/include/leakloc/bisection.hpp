#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "leakloc/network.hpp"

namespace leakloc {

enum class BisectionMode { Lexicographic, GoalProgramming };

/// Admissible sizes for the smaller side S.
struct SizeWindow {
  std::size_t min = 0;
  std::size_t max = 0;
  bool contains(std::size_t k) const { return k >= min && k <= max; }
};

/// max = floor(n/2); min = floor(n/2) for Lexicographic, otherwise
/// ceil((0.5 - gamma) n) clamped to floor(n/2).
SizeWindow size_window(std::size_t n, BisectionMode mode, double gamma);

/// Per-edge costs from query_cost, indexed like Network::edges().
std::vector<double> query_cost_weights(const Network& net);

/// Cut-cost minimization over the size window. Holds a non-owning view of
/// the network, which must outlive the problem.
struct BisectionProblem {
  BisectionProblem(const Network& network, std::vector<double> edge_weights,
                   BisectionMode bisection_mode = BisectionMode::GoalProgramming, double balance_gamma = 0.1);
  explicit BisectionProblem(const Network& network, BisectionMode bisection_mode = BisectionMode::GoalProgramming,
                            double balance_gamma = 0.1);

  const Network* net;
  std::vector<double> weights;
  BisectionMode mode;
  double gamma;

  SizeWindow window() const { return size_window(net->n(), mode, gamma); }
  /// Half the smallest weight. Only documents the tie-break: the solvers
  /// realize it as "largest |S| among minimum-cost solutions".
  double epsilon() const;
};

struct Partition {
  std::vector<NodeId> s_nodes;     // sorted
  std::vector<NodeId> sbar_nodes;  // sorted
  std::vector<EdgeId> cut_edges;   // sorted
  double cut_cost = 0.0;

  std::size_t s_size() const { return s_nodes.size(); }
  std::size_t sbar_size() const { return sbar_nodes.size(); }
  bool operator==(const Partition&) const = default;
};

/// Sum over edges of w_k |x_i - x_j|; `x` is indexed by dense node index.
/// Throws std::invalid_argument on size mismatch or entries outside {0,1}.
double cut_cost(const Network& net, std::span<const std::uint8_t> x);
double cut_cost(const Network& net, std::span<const double> weights, std::span<const std::uint8_t> x);

/// Builds a normalized partition from an indicator over dense indices: the
/// smaller side becomes S, and on equal sizes S is the side holding the
/// smallest node id.
Partition make_partition(const Network& net, std::span<const double> weights, std::span<const std::uint8_t> x);

/// Equality of cut costs up to accumulated round-off.
bool same_cost(double a, double b);

/// True when (cost_a, -size_a, S_a) precedes (cost_b, -size_b, S_b): lower
/// cost, then larger S, then lexicographically smaller sorted S.
bool better_partition(const Partition& a, const Partition& b);

/// Zero-cost split of a network whose components (over edges with positive
/// weight) number more than one: whole components are grouped so that |S|
/// lands in the window, as close to its upper end as possible.
Partition group_components(const Network& net, std::span<const double> weights, SizeWindow window);

struct BruteForceOptions {
  std::size_t max_nodes = 20;
};

/// Exhaustive enumeration with the same tie-breaking as solve_bisection.
Partition brute_force_bisection(const BisectionProblem& problem, const BruteForceOptions& options = {});

}  // namespace leakloc
