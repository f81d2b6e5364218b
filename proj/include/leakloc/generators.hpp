#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

#include "leakloc/network.hpp"

namespace leakloc {

/// Synthetic test networks. Node ids start at 1, costs are 1, and node 1 is
/// the only source, feeding a unit demand at every other node.
Network path_graph(std::size_t n);
Network cycle_graph(std::size_t n);
/// rows x cols lattice, ids row-major, coordinates (col, row).
Network grid_graph(std::size_t rows, std::size_t cols);
/// Random spanning tree plus every remaining pair with probability p.
Network random_connected_graph(std::size_t n, double p, std::uint64_t seed);
/// K_clique with a path of `tail` extra nodes hanging off its last node.
Network lollipop_graph(std::size_t clique, std::size_t tail);

/// Builds a network from a compact spec: "path:N", "cycle:N", "grid:RxC",
/// "random-connected:N:P" or "lollipop:K:T". Throws InvalidNetwork.
Network generate_graph(std::string_view spec, std::uint64_t seed = 1);

/// Deterministic across platforms: built on raw mt19937_64 output rather
/// than the implementation-defined std distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  double uniform();                          // [0, 1)
  std::size_t below(std::size_t bound);      // [0, bound)
  long long between(long long lo, long long hi);  // [lo, hi]

 private:
  std::mt19937_64 engine_;
};

}  // namespace leakloc
