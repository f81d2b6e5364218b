#include "leakloc/matrices.hpp"

#include <limits>
#include <stdexcept>

namespace leakloc {

namespace {

using IntTriplet = Eigen::Triplet<int>;

IntSparse from_triplets(std::size_t rows, std::size_t cols, const std::vector<IntTriplet>& t) {
  IntSparse out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  out.setFromTriplets(t.begin(), t.end());
  out.makeCompressed();
  return out;
}

}  // namespace

IntSparse incidence(const Network& net) {
  std::vector<IntTriplet> t;
  t.reserve(2 * net.m());
  for (std::size_t k = 0; k < net.m(); ++k) {
    const auto [a, b] = net.endpoints(k);
    t.emplace_back(static_cast<int>(a), static_cast<int>(k), 1);
    t.emplace_back(static_cast<int>(b), static_cast<int>(k), -1);
  }
  return from_triplets(net.n(), net.m(), t);
}

IntSparse adjacency(const Network& net) {
  std::vector<IntTriplet> t;
  t.reserve(2 * net.m());
  for (std::size_t k = 0; k < net.m(); ++k) {
    const auto [a, b] = net.endpoints(k);
    t.emplace_back(static_cast<int>(a), static_cast<int>(b), 1);
    t.emplace_back(static_cast<int>(b), static_cast<int>(a), 1);
  }
  return from_triplets(net.n(), net.n(), t);
}

IntSparse degree_matrix(const Network& net) {
  std::vector<IntTriplet> t;
  t.reserve(net.n());
  for (std::size_t v = 0; v < net.n(); ++v)
    t.emplace_back(static_cast<int>(v), static_cast<int>(v), static_cast<int>(net.degree(v)));
  return from_triplets(net.n(), net.n(), t);
}

IntSparse laplacian(const Network& net) {
  IntSparse l = degree_matrix(net) - adjacency(net);
  l.prune(0);
  l.makeCompressed();
  return l;
}

IntSparse laplacian_from_incidence(const Network& net) {
  const IntSparse j = incidence(net);
  IntSparse l = (j * IntSparse(j.transpose())).pruned();
  l.makeCompressed();
  return l;
}

RealSparse weighted_incidence_laplacian(const Network& net, std::span<const double> column_scale) {
  if (column_scale.size() != net.m()) throw std::invalid_argument("weighted laplacian: weight count != m");
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(4 * net.m());
  for (std::size_t k = 0; k < net.m(); ++k) {
    const double w2 = column_scale[k] * column_scale[k];
    if (w2 == 0.0) continue;
    const auto [a, b] = net.endpoints(k);
    const int ia = static_cast<int>(a), ib = static_cast<int>(b);
    t.emplace_back(ia, ia, w2);
    t.emplace_back(ib, ib, w2);
    t.emplace_back(ia, ib, -w2);
    t.emplace_back(ib, ia, -w2);
  }
  RealSparse l(static_cast<Eigen::Index>(net.n()), static_cast<Eigen::Index>(net.n()));
  l.setFromTriplets(t.begin(), t.end());
  l.makeCompressed();
  return l;
}

std::vector<std::size_t> component_labels(const Network& net, const std::vector<bool>& edge_mask) {
  if (!edge_mask.empty() && edge_mask.size() != net.m())
    throw std::invalid_argument("component_labels: mask size != m");
  constexpr std::size_t unset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> label(net.n(), unset);
  std::vector<std::size_t> stack;
  std::size_t next = 0;
  for (std::size_t root = 0; root < net.n(); ++root) {
    if (label[root] != unset) continue;
    label[root] = next;
    stack.push_back(root);
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (const auto& inc : net.incident(v)) {
        if (!edge_mask.empty() && !edge_mask[inc.edge]) continue;
        if (label[inc.neighbor] == unset) {
          label[inc.neighbor] = next;
          stack.push_back(inc.neighbor);
        }
      }
    }
    ++next;
  }
  return label;
}

std::vector<std::vector<NodeId>> connected_components(const Network& net) {
  const auto label = component_labels(net);
  std::size_t count = 0;
  for (std::size_t l : label) count = std::max(count, l + 1);
  std::vector<std::vector<NodeId>> out(count);
  for (std::size_t v = 0; v < net.n(); ++v) out[label[v]].push_back(net.nodes()[v].id);
  return out;
}

}  // namespace leakloc
