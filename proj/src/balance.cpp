#include "leakloc/balance.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "leakloc/error.hpp"

namespace leakloc {

double into_envelope(const Edge& edge, NodeId inside_endpoint, double flow) {
  if (inside_endpoint == edge.j) return flow;
  if (inside_endpoint == edge.i) return -flow;
  throw InvalidNetwork("node " + std::to_string(inside_endpoint) + " is not an endpoint of edge " +
                       std::to_string(edge.id));
}

EnvelopeBalance make_balance(double inflow, double production, double outflow, double consumption) {
  return {inflow, production, outflow, consumption, production + inflow - consumption - outflow};
}

EnvelopeBalance envelope_balance(const Network& net, std::span<const NodeId> inside,
                                 std::span<const CrossingFlow> crossing) {
  std::unordered_set<NodeId> members(inside.begin(), inside.end());
  double production = 0.0, consumption = 0.0, inflow = 0.0, outflow = 0.0;
  for (NodeId id : members) {
    const double b = net.node(id).boundary_flow;
    if (b > 0.0) production += b;
    else consumption -= b;
  }
  std::unordered_set<EdgeId> seen;
  for (const CrossingFlow& c : crossing) {
    if (!seen.insert(c.edge).second) throw InvalidNetwork("edge " + std::to_string(c.edge) + " appears twice");
    const Edge& e = net.edge(c.edge);
    const bool in_i = members.contains(e.i);
    const bool in_j = members.contains(e.j);
    if (in_i == in_j)
      throw InvalidNetwork("edge " + std::to_string(e.id) + " does not cross the envelope boundary");
    const double q = into_envelope(e, in_i ? e.i : e.j, c.flow);
    if (q > 0.0) inflow += q;
    else outflow -= q;
  }
  return make_balance(inflow, production, outflow, consumption);
}

EnvelopeBalance envelope_balance(const Network& sub, std::span<const double> into_flows) {
  double production = 0.0, consumption = 0.0, inflow = 0.0, outflow = 0.0;
  for (const Node& v : sub.nodes()) {
    if (v.boundary_flow > 0.0) production += v.boundary_flow;
    else consumption -= v.boundary_flow;
  }
  for (double q : into_flows) {
    if (q > 0.0) inflow += q;
    else outflow -= q;
  }
  return make_balance(inflow, production, outflow, consumption);
}

double default_tolerance(double total_production) { return 1e-9 * std::max(total_production, 1.0); }

BalanceVerdict judge(const EnvelopeBalance& balance, double tolerance) {
  return {std::abs(balance.imbalance) > tolerance, balance.imbalance, tolerance};
}

std::vector<LeakyPartition> find_leaky_partitions(std::span<const EnvelopeBalance> partitions, double tolerance,
                                                  LeakMultiplicity multiplicity, bool parent_leaky) {
  std::vector<LeakyPartition> leaky;
  for (std::size_t k = 0; k < partitions.size(); ++k) {
    const BalanceVerdict v = judge(partitions[k], tolerance);
    if (v.leaky) leaky.push_back({k, v});
  }
  if (leaky.empty() && parent_leaky)
    throw NoLeakDetected("no partition shows an imbalance although the parent envelope does");
  if (leaky.size() > 1 && multiplicity == LeakMultiplicity::Single)
    throw MultipleLeaksInSingleLeakMode(std::to_string(leaky.size()) +
                                        " partitions show an imbalance in single-leak mode");
  return leaky;
}

}  // namespace leakloc
