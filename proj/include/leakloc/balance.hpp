#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "leakloc/network.hpp"

namespace leakloc {

/// A measured flow on an edge that crosses an envelope boundary, signed by
/// the edge's own i -> j convention.
struct CrossingFlow {
  EdgeId edge = 0;
  double flow = 0.0;
};

struct EnvelopeBalance {
  double inflow = 0.0;
  double production = 0.0;
  double outflow = 0.0;
  double consumption = 0.0;
  // production + inflow - consumption - outflow; positive means flow is lost
  // inside the envelope.
  double imbalance = 0.0;
};

struct BalanceVerdict {
  bool leaky = false;
  double imbalance = 0.0;
  double tolerance_used = 0.0;
};

/// Converts an edge-convention flow into "into the envelope" orientation.
/// `inside_endpoint` must be one of the edge's endpoints.
double into_envelope(const Edge& edge, NodeId inside_endpoint, double flow);

/// Steady-state balance over the nodes `inside` of `net`. Every crossing
/// edge must have exactly one endpoint inside; throws InvalidNetwork
/// otherwise.
EnvelopeBalance envelope_balance(const Network& net, std::span<const NodeId> inside,
                                 std::span<const CrossingFlow> crossing);

/// Balance over a whole network with crossing flows already in
/// into-envelope orientation.
EnvelopeBalance envelope_balance(const Network& sub, std::span<const double> into_flows);

EnvelopeBalance make_balance(double inflow, double production, double outflow, double consumption);

/// 1e-9 * max(total production, 1).
double default_tolerance(double total_production);

BalanceVerdict judge(const EnvelopeBalance& balance, double tolerance);

enum class LeakMultiplicity { Single, Multiple };

struct LeakyPartition {
  std::size_t index = 0;
  BalanceVerdict verdict;
};

/// Every envelope whose |imbalance| exceeds `tolerance`, in input order.
/// Throws NoLeakDetected when none is leaky although `parent_leaky`, and
/// MultipleLeaksInSingleLeakMode when more than one is leaky in single mode.
std::vector<LeakyPartition> find_leaky_partitions(std::span<const EnvelopeBalance> partitions, double tolerance,
                                                  LeakMultiplicity multiplicity, bool parent_leaky = true);

}  // namespace leakloc
