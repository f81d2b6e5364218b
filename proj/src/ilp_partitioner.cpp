#include "leakloc/ilp_partitioner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "leakloc/error.hpp"
#include "leakloc/matrices.hpp"
#include "leakloc/spectral.hpp"

namespace leakloc {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

struct WeightedArc {
  std::size_t to;
  double w;
};

bool exceeds(double bound, double incumbent) {
  return bound > incumbent + 1e-9 * std::max(1.0, std::abs(incumbent));
}

// Depth-first search over a fixed node order with incremental bound state.
class Search {
 public:
  enum class Goal { Optimize, FirstMatch };

  Search(const Network& net, std::span<const double> weights, SizeWindow window, std::vector<std::size_t> order,
         std::size_t budget)
      : n_(net.n()), window_(window), order_(std::move(order)), budget_(budget), arcs_(n_),
        side_(n_, -1), to_s_(n_, 0.0), to_sbar_(n_, 0.0), touch_(n_, 0), frontier_pos_(n_, kNone) {
    for (std::size_t k = 0; k < net.m(); ++k) {
      if (weights[k] <= 0.0) continue;
      const auto [a, b] = net.endpoints(k);
      arcs_[a].push_back({b, weights[k]});
      arcs_[b].push_back({a, weights[k]});
    }
  }

  void set_incumbent(std::vector<std::uint8_t> x, double cost) {
    best_x_ = std::move(x);
    best_cost_ = cost;
    best_size_ = static_cast<std::size_t>(std::count(best_x_.begin(), best_x_.end(), 1));
  }

  void optimize() {
    goal_ = Goal::Optimize;
    run();
  }

  /// Lexicographically first x (include-first over `order`) with cost
  /// within `target_cost` and |S| inside the window.
  void first_match(double target_cost) {
    goal_ = Goal::FirstMatch;
    best_cost_ = target_cost;
    run();
  }

  bool exhausted() const { return exhausted_; }
  bool found() const { return found_; }
  std::size_t nodes() const { return nodes_; }
  const std::vector<std::uint8_t>& best_x() const { return best_x_; }
  double best_cost() const { return best_cost_; }

 private:
  struct Trail {
    std::size_t node;
    double to_s, to_sbar;
  };

  void run() {
    stop_ = false;
    dfs(0);
  }

  void frontier_add(std::size_t v) {
    frontier_pos_[v] = frontier_.size();
    frontier_.push_back(v);
  }
  void frontier_remove(std::size_t v) {
    const std::size_t p = frontier_pos_[v];
    if (p == kNone) return;
    const std::size_t last = frontier_.back();
    frontier_[p] = last;
    frontier_pos_[last] = p;
    frontier_.pop_back();
    frontier_pos_[v] = kNone;
  }

  void assign(std::size_t v, int side) {
    side_[v] = static_cast<std::int8_t>(side);
    frontier_remove(v);
    fixed_trail_.push_back(fixed_);
    fixed_ += side == 1 ? to_sbar_[v] : to_s_[v];
    if (side == 1) ++count_s_;
    trail_marks_.push_back(trail_.size());
    for (const WeightedArc& arc : arcs_[v]) {
      const std::size_t u = arc.to;
      if (side_[u] != -1) continue;
      trail_.push_back({u, to_s_[u], to_sbar_[u]});
      (side == 1 ? to_s_[u] : to_sbar_[u]) += arc.w;
      if (touch_[u]++ == 0) frontier_add(u);
    }
  }

  void unassign(std::size_t v) {
    const std::size_t mark = trail_marks_.back();
    trail_marks_.pop_back();
    while (trail_.size() > mark) {
      const Trail t = trail_.back();
      trail_.pop_back();
      to_s_[t.node] = t.to_s;
      to_sbar_[t.node] = t.to_sbar;
      if (--touch_[t.node] == 0) frontier_remove(t.node);
    }
    fixed_ = fixed_trail_.back();
    fixed_trail_.pop_back();
    if (side_[v] == 1) --count_s_;
    side_[v] = -1;
    if (touch_[v] > 0) frontier_add(v);
  }

  // Lower bound on the completed cut; infinity when the window is
  // unreachable. `reach` receives the largest |S| still attainable.
  double bound(std::size_t depth, std::size_t& reach) {
    const std::size_t unassigned = n_ - depth;
    if (count_s_ > window_.max || count_s_ + unassigned < window_.min) return std::numeric_limits<double>::infinity();
    const std::size_t lo = window_.min > count_s_ ? window_.min - count_s_ : 0;
    const std::size_t hi = std::min(unassigned, window_.max - count_s_);
    reach = count_s_ + hi;

    // Placing u in S costs to_sbar[u], in S-bar costs to_s[u].
    double base = fixed_;
    deltas_.clear();
    for (std::size_t u : frontier_) {
      base += to_s_[u];
      deltas_.push_back(to_sbar_[u] - to_s_[u]);
    }
    std::sort(deltas_.begin(), deltas_.end());
    const std::size_t silent = unassigned - frontier_.size();  // delta 0
    std::size_t negative = 0;
    while (negative < deltas_.size() && deltas_[negative] < 0.0) ++negative;
    const std::size_t take = std::clamp(negative, lo, hi);
    double extra = 0.0;
    if (take <= negative) {
      for (std::size_t r = 0; r < take; ++r) extra += deltas_[r];
    } else {
      for (std::size_t r = 0; r < negative; ++r) extra += deltas_[r];
      std::size_t need = take - negative;
      const std::size_t free_slots = std::min(need, silent);
      need -= free_slots;
      for (std::size_t r = negative; r < deltas_.size() && need > 0; ++r, --need) extra += deltas_[r];
    }
    return base + extra;
  }

  void leaf() {
    std::vector<std::uint8_t> x(n_);
    for (std::size_t v = 0; v < n_; ++v) x[v] = side_[v] == 1 ? 1 : 0;
    const std::size_t size = count_s_;
    if (goal_ == Goal::FirstMatch) {
      if (!exceeds(fixed_, best_cost_)) {
        best_x_ = std::move(x);
        found_ = true;
        stop_ = true;
      }
      return;
    }
    // S and its complement tie when both have n/2 nodes; keep the one
    // holding the smallest id.
    if (2 * size == n_ && x[0] == 0)
      for (auto& b : x) b ^= 1U;
    bool take = best_x_.empty();
    if (!take) {
      if (!same_cost(fixed_, best_cost_)) take = fixed_ < best_cost_;
      else if (size != best_size_) take = size > best_size_;
      else take = std::lexicographical_compare(best_x_.begin(), best_x_.end(), x.begin(), x.end());
    }
    if (take) {
      best_x_ = std::move(x);
      best_cost_ = fixed_;
      best_size_ = size;
    }
  }

  bool prune(double lb, std::size_t reach) const {
    if (goal_ == Goal::FirstMatch) return exceeds(lb, best_cost_);
    if (best_x_.empty()) return false;
    if (exceeds(lb, best_cost_)) return true;
    // Cannot beat the incumbent's cost; can it beat its size?
    return lb >= best_cost_ - 1e-9 * std::max(1.0, std::abs(best_cost_)) && reach <= best_size_;
  }

  void dfs(std::size_t depth) {
    if (stop_) return;
    if (++nodes_ > budget_) {
      exhausted_ = true;
      stop_ = true;
      return;
    }
    if (depth == n_) {
      leaf();
      return;
    }
    std::size_t reach = 0;
    const double lb = bound(depth, reach);
    if (std::isinf(lb) || prune(lb, reach)) return;

    const std::size_t v = order_[depth];
    int first;
    if (goal_ == Goal::FirstMatch) {
      first = 1;
    } else {
      const double cost_s = to_sbar_[v], cost_sbar = to_s_[v];
      if (cost_s != cost_sbar) first = cost_s < cost_sbar ? 1 : 0;
      else first = best_x_.empty() ? 0 : best_x_[v];
    }
    for (int side : {first, 1 - first}) {
      if (side == 1 && count_s_ + 1 > window_.max) continue;
      if (side == 0 && count_s_ + (n_ - depth - 1) < window_.min) continue;
      assign(v, side);
      dfs(depth + 1);
      unassign(v);
      if (stop_) return;
    }
  }

  std::size_t n_;
  SizeWindow window_;
  std::vector<std::size_t> order_;
  std::size_t budget_;
  std::vector<std::vector<WeightedArc>> arcs_;

  std::vector<std::int8_t> side_;
  std::vector<double> to_s_, to_sbar_;
  std::vector<int> touch_;
  std::vector<std::size_t> frontier_, frontier_pos_;
  std::vector<Trail> trail_;
  std::vector<std::size_t> trail_marks_;
  std::vector<double> fixed_trail_;
  std::vector<double> deltas_;
  double fixed_ = 0.0;
  std::size_t count_s_ = 0;

  Goal goal_ = Goal::Optimize;
  std::vector<std::uint8_t> best_x_;
  double best_cost_ = std::numeric_limits<double>::infinity();
  std::size_t best_size_ = 0;
  bool found_ = false;
  bool stop_ = false;
  bool exhausted_ = false;
  std::size_t nodes_ = 0;
};

// Start at the heaviest node, then repeatedly take the node most strongly
// tied to those already ordered (ties: higher degree, then lower id). Keeps
// the assigned region compact so the frontier bound bites early.
std::vector<std::size_t> connectivity_order(const Network& net, std::span<const double> weights) {
  const std::size_t n = net.n();
  std::vector<double> weighted_degree(n, 0.0);
  for (std::size_t k = 0; k < net.m(); ++k) {
    const auto [a, b] = net.endpoints(k);
    weighted_degree[a] += weights[k];
    weighted_degree[b] += weights[k];
  }
  std::vector<double> tie(n, 0.0);
  std::vector<std::size_t> links(n, 0);
  std::vector<bool> placed(n, false);
  std::vector<std::size_t> order;
  order.reserve(n);
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t pick = kNone;
    for (std::size_t v = 0; v < n; ++v) {
      if (placed[v]) continue;
      if (pick == kNone) {
        pick = v;
        continue;
      }
      if (step == 0) {
        if (weighted_degree[v] > weighted_degree[pick]) pick = v;
        continue;
      }
      if (tie[v] != tie[pick]) {
        if (tie[v] > tie[pick]) pick = v;
      } else if (links[v] != links[pick]) {
        if (links[v] > links[pick]) pick = v;
      } else if (net.degree(v) > net.degree(pick)) {
        pick = v;
      }
    }
    placed[pick] = true;
    order.push_back(pick);
    for (const auto& inc : net.incident(pick)) {
      tie[inc.neighbor] += weights[inc.edge];
      ++links[inc.neighbor];
    }
  }
  return order;
}

}  // namespace

IlpSolution solve_bisection_detailed(const BisectionProblem& problem, const IlpOptions& options) {
  const Network& net = *problem.net;
  const std::size_t n = net.n();
  if (n < 2) throw std::invalid_argument("bisection needs n >= 2");
  if (connected_components(net).size() > 1) throw DisconnectedInput("bisection: network is disconnected");
  const SizeWindow window = problem.window();

  Search search(net, problem.weights, window, connectivity_order(net, problem.weights), options.node_budget);
  if (options.spectral_incumbent) {
    const SpectralSolution seed = spectral_bisect(problem);
    if (window.contains(seed.partition.s_size())) {
      std::vector<std::uint8_t> x(n, 0);
      for (NodeId id : seed.partition.s_nodes) x[net.index_of(id)] = 1;
      search.set_incumbent(std::move(x), seed.partition.cut_cost);
    }
  }
  search.optimize();

  IlpSolution out;
  out.proven_optimal = !search.exhausted();
  out.nodes_explored = search.nodes();
  std::vector<std::uint8_t> x = search.best_x();
  Partition best = make_partition(net, problem.weights, x);

  if (out.proven_optimal) {
    const std::size_t k = best.s_size();
    std::vector<std::size_t> by_id(n);
    std::iota(by_id.begin(), by_id.end(), 0);
    Search canon(net, problem.weights, SizeWindow{k, k}, std::move(by_id), options.node_budget);
    canon.first_match(best.cut_cost);
    out.nodes_explored += canon.nodes();
    if (canon.found()) {
      Partition candidate = make_partition(net, problem.weights, canon.best_x());
      if (same_cost(candidate.cut_cost, best.cut_cost) && candidate.s_size() == k) {
        if (candidate.s_nodes < best.s_nodes) best = std::move(candidate);
        out.canonical = true;
      }
    }
  }
  out.partition = std::move(best);
  return out;
}

Partition solve_bisection(const BisectionProblem& problem, const IlpOptions& options) {
  return solve_bisection_detailed(problem, options).partition;
}

}  // namespace leakloc
