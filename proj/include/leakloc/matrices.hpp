#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/SparseCore>

#include "leakloc/network.hpp"

namespace leakloc {

using IntSparse = Eigen::SparseMatrix<int, Eigen::ColMajor>;
using RealSparse = Eigen::SparseMatrix<double, Eigen::ColMajor>;

/// n x m signed incidence: column k has +1 at row i and -1 at row j.
IntSparse incidence(const Network& net);
/// Entry (i, j) counts the edges joining i and j, so parallel pipes agree
/// with J J^T.
IntSparse adjacency(const Network& net);
IntSparse degree_matrix(const Network& net);
/// L = D - A.
IntSparse laplacian(const Network& net);
/// L = J J^T, the second construction kept as a cross-check.
IntSparse laplacian_from_incidence(const Network& net);

/// J_w J_w^T where column k of J_w carries +/-w_k.
RealSparse weighted_incidence_laplacian(const Network& net, std::span<const double> column_scale);

/// Component id (0-based, ordered by smallest member) of every dense node
/// index. Edges with `edge_mask[k] == false` are ignored when a mask is given.
std::vector<std::size_t> component_labels(const Network& net, const std::vector<bool>& edge_mask = {});

/// Node-id sets of the connected components, each sorted, ordered by
/// smallest id.
std::vector<std::vector<NodeId>> connected_components(const Network& net);

}  // namespace leakloc
