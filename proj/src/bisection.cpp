#include "leakloc/bisection.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "leakloc/error.hpp"
#include "leakloc/matrices.hpp"

namespace leakloc {

SizeWindow size_window(std::size_t n, BisectionMode mode, double gamma) {
  if (n < 2) throw std::invalid_argument("size window needs n >= 2");
  const std::size_t half = n / 2;
  if (mode == BisectionMode::Lexicographic) return {half, half};
  if (!(gamma >= 0.0 && gamma < 0.5)) throw std::invalid_argument("gamma must lie in [0, 0.5)");
  // Guard against 0.4 * n landing a hair above an integer.
  const double goal = std::ceil((0.5 - gamma) * static_cast<double>(n) - 1e-9);
  const auto lo = static_cast<std::size_t>(std::max(goal, 1.0));
  return {std::min(lo, half), half};
}

std::vector<double> query_cost_weights(const Network& net) {
  std::vector<double> w;
  w.reserve(net.m());
  for (const Edge& e : net.edges()) w.push_back(e.query_cost);
  return w;
}

BisectionProblem::BisectionProblem(const Network& network, std::vector<double> edge_weights,
                                   BisectionMode bisection_mode, double balance_gamma)
    : net(&network), weights(std::move(edge_weights)), mode(bisection_mode), gamma(balance_gamma) {
  if (weights.size() != net->m()) throw std::invalid_argument("bisection problem: weight count != m");
  for (double w : weights)
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("bisection problem: bad weight");
}

BisectionProblem::BisectionProblem(const Network& network, BisectionMode bisection_mode, double balance_gamma)
    : BisectionProblem(network, query_cost_weights(network), bisection_mode, balance_gamma) {}

double BisectionProblem::epsilon() const {
  if (weights.empty()) return 0.0;
  return 0.5 * *std::min_element(weights.begin(), weights.end());
}

namespace {

void check_indicator(const Network& net, std::span<const std::uint8_t> x) {
  if (x.size() != net.n()) throw std::invalid_argument("indicator length != n");
  for (std::uint8_t v : x)
    if (v > 1) throw std::invalid_argument("indicator entries must be 0 or 1");
}

}  // namespace

double cut_cost(const Network& net, std::span<const double> weights, std::span<const std::uint8_t> x) {
  check_indicator(net, x);
  if (weights.size() != net.m()) throw std::invalid_argument("weight count != m");
  double cost = 0.0;
  for (std::size_t k = 0; k < net.m(); ++k) {
    const auto [a, b] = net.endpoints(k);
    if (x[a] != x[b]) cost += weights[k];
  }
  return cost;
}

double cut_cost(const Network& net, std::span<const std::uint8_t> x) {
  return cut_cost(net, query_cost_weights(net), x);
}

Partition make_partition(const Network& net, std::span<const double> weights, std::span<const std::uint8_t> x) {
  check_indicator(net, x);
  std::size_t ones = 0;
  for (std::uint8_t v : x) ones += v;
  const std::size_t zeros = net.n() - ones;
  // Which indicator value marks S after normalization.
  std::uint8_t s_mark = 1;
  if (ones > zeros) s_mark = 0;
  else if (ones == zeros && net.n() > 0) s_mark = x[0];

  Partition p;
  for (std::size_t v = 0; v < net.n(); ++v)
    (x[v] == s_mark ? p.s_nodes : p.sbar_nodes).push_back(net.nodes()[v].id);
  for (std::size_t k = 0; k < net.m(); ++k) {
    const auto [a, b] = net.endpoints(k);
    if (x[a] != x[b]) p.cut_edges.push_back(net.edges()[k].id);
  }
  p.cut_cost = cut_cost(net, weights, x);
  return p;
}

bool same_cost(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

bool better_partition(const Partition& a, const Partition& b) {
  if (!same_cost(a.cut_cost, b.cut_cost)) return a.cut_cost < b.cut_cost;
  if (a.s_size() != b.s_size()) return a.s_size() > b.s_size();
  return a.s_nodes < b.s_nodes;
}

Partition group_components(const Network& net, std::span<const double> weights, SizeWindow window) {
  std::vector<bool> mask(net.m());
  for (std::size_t k = 0; k < net.m(); ++k) mask[k] = weights[k] > 0.0;
  const auto label = component_labels(net, mask);
  std::size_t count = 0;
  for (std::size_t l : label) count = std::max(count, l + 1);
  std::vector<std::size_t> sizes(count, 0);
  for (std::size_t l : label) ++sizes[l];

  // reach[c][s]: some subset of the first c components has total size s.
  const std::size_t n = net.n();
  std::vector<std::vector<bool>> reach(count + 1, std::vector<bool>(n + 1, false));
  reach[0][0] = true;
  for (std::size_t c = 0; c < count; ++c)
    for (std::size_t s = 0; s <= n; ++s)
      if (reach[c][s]) {
        reach[c + 1][s] = true;
        reach[c + 1][s + sizes[c]] = true;
      }

  // Preference: inside the window, largest first; otherwise nearest to it.
  std::size_t target = 0;
  bool found = false;
  for (std::size_t s = window.max; s >= window.min && s >= 1; --s) {
    if (reach[count][s]) {
      target = s;
      found = true;
      break;
    }
    if (s == 0) break;
  }
  if (!found) {
    std::size_t best_gap = std::numeric_limits<std::size_t>::max();
    for (std::size_t s = 1; s < n; ++s) {
      if (!reach[count][s]) continue;
      const std::size_t gap = s < window.min ? window.min - s : (s > window.max ? s - window.max : 0);
      if (gap < best_gap) {
        best_gap = gap;
        target = s;
      }
    }
    if (best_gap == std::numeric_limits<std::size_t>::max())
      throw DisconnectedInput("group_components: network has a single positive-weight component");
  }

  // Walk back, preferring to include later components so that the earliest
  // (smallest-id) components tend to land together.
  std::vector<bool> take(count, false);
  std::size_t s = target;
  for (std::size_t c = count; c-- > 0;) {
    if (s >= sizes[c] && reach[c][s - sizes[c]]) {
      take[c] = true;
      s -= sizes[c];
    }
  }
  std::vector<std::uint8_t> x(n, 0);
  for (std::size_t v = 0; v < n; ++v) x[v] = take[label[v]] ? 1 : 0;
  return make_partition(net, weights, x);
}

Partition brute_force_bisection(const BisectionProblem& problem, const BruteForceOptions& options) {
  const Network& net = *problem.net;
  const std::size_t n = net.n();
  if (n < 2) throw std::invalid_argument("brute force bisection needs n >= 2");
  if (n > options.max_nodes || n > 30)
    throw std::invalid_argument("brute force bisection: n = " + std::to_string(n) + " exceeds the cap");
  const SizeWindow window = problem.window();

  std::vector<std::uint64_t> edge_masks(net.m());
  for (std::size_t k = 0; k < net.m(); ++k) {
    const auto [a, b] = net.endpoints(k);
    edge_masks[k] = (std::uint64_t{1} << a) | (std::uint64_t{1} << b);
  }

  bool have = false;
  double best_cost = 0.0;
  std::size_t best_size = 0;
  std::uint64_t best_mask = 0;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t mask = 1; mask + 1 < total; ++mask) {
    const auto size = static_cast<std::size_t>(std::popcount(mask));
    if (!window.contains(size)) continue;
    double cost = 0.0;
    for (std::size_t k = 0; k < net.m(); ++k) {
      const std::uint64_t hit = mask & edge_masks[k];
      if (hit != 0 && hit != edge_masks[k]) cost += problem.weights[k];
    }
    bool take = !have;
    if (have) {
      if (!same_cost(cost, best_cost)) take = cost < best_cost;
      else if (size != best_size) take = size > best_size;
      else {
        // Same size: the lowest differing index decides the sorted-id order.
        const std::uint64_t diff = mask ^ best_mask;
        take = diff != 0 && (mask & (diff & (~diff + 1))) != 0;
      }
    }
    if (take) {
      have = true;
      best_cost = cost;
      best_size = size;
      best_mask = mask;
    }
  }
  std::vector<std::uint8_t> x(n);
  for (std::size_t v = 0; v < n; ++v) x[v] = (best_mask >> v) & 1U;
  return make_partition(net, problem.weights, x);
}

}  // namespace leakloc
