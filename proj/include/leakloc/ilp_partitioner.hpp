#pragma once

#include <cstddef>

#include "leakloc/bisection.hpp"

namespace leakloc {

struct IlpOptions {
  /// Branch-and-bound nodes allowed for the optimization pass and, separately,
  /// for the pass that canonicalizes ties. An exhausted budget returns the
  /// best incumbent found, flagged as not proven optimal.
  std::size_t node_budget = 2'000'000;
  /// Start from the spectral partition instead of an empty incumbent.
  bool spectral_incumbent = true;
};

struct IlpSolution {
  Partition partition;
  bool proven_optimal = false;
  /// The returned S is the lexicographically smallest among optima of equal
  /// cost and size.
  bool canonical = false;
  std::size_t nodes_explored = 0;
};

/// Minimum cut cost over the size window.
///
/// The binary indicator x is searched directly; the auxiliary t1/t2
/// variables of the linearized model are implied by x (t1 - t2 = J^T x,
/// one of them zero) and never materialized. Bounds per search node:
///   - cost of edges whose endpoints are already on opposite sides;
///   - for every unassigned node, the cheaper of the edges it must cut to
///     either side, combined under the number of nodes the window still
///     forces into S.
/// Among minimum-cost solutions the largest S wins (the effect of the
/// (eps/n) 1^T x term with eps = min(w)/2), then the lexicographically
/// smallest sorted S.
///
/// Throws DisconnectedInput for disconnected networks and
/// std::invalid_argument for n < 2.
IlpSolution solve_bisection_detailed(const BisectionProblem& problem, const IlpOptions& options = {});

Partition solve_bisection(const BisectionProblem& problem, const IlpOptions& options = {});

}  // namespace leakloc
