#include <gtest/gtest.h>

#include "leakloc/bisection.hpp"
#include "leakloc/error.hpp"
#include "leakloc/generators.hpp"
#include "test_support.hpp"

using namespace leakloc;
using namespace leakloc::testing;

TEST(CutCost, Examples) {
  const std::vector<std::uint8_t> p3{1, 0, 0};
  EXPECT_EQ(cut_cost(path_graph(3), p3), 1.0);
  const std::vector<std::uint8_t> k4{1, 1, 0, 0};
  EXPECT_EQ(cut_cost(complete_graph(4), k4), 4.0);
  const std::vector<std::uint8_t> ones(6, 1);
  EXPECT_EQ(cut_cost(cycle_graph(6), ones), 0.0);
  const std::vector<std::uint8_t> wrong{1, 0};
  EXPECT_THROW(cut_cost(path_graph(3), wrong), std::invalid_argument);
  const std::vector<std::uint8_t> not_binary{2, 0, 0};
  EXPECT_THROW(cut_cost(path_graph(3), not_binary), std::invalid_argument);
}

TEST(SizeWindow, Rules) {
  EXPECT_EQ(size_window(10, BisectionMode::Lexicographic, 0.1).min, 5u);
  EXPECT_EQ(size_window(10, BisectionMode::GoalProgramming, 0.1).min, 4u);
  EXPECT_EQ(size_window(10, BisectionMode::GoalProgramming, 0.1).max, 5u);
  EXPECT_EQ(size_window(3, BisectionMode::GoalProgramming, 0.1).min, 1u);  // clamped to floor(n/2)
  EXPECT_EQ(size_window(400, BisectionMode::GoalProgramming, 0.1).min, 160u);
  EXPECT_EQ(size_window(5, BisectionMode::GoalProgramming, 0.0).min, 2u);
  EXPECT_EQ(size_window(2, BisectionMode::GoalProgramming, 0.45).min, 1u);
}

TEST(Partition, Normalization) {
  const Network net = path_graph(4);
  const std::vector<double> w(3, 1.0);
  const std::vector<std::uint8_t> x{0, 0, 1, 1};
  const Partition p = make_partition(net, w, x);
  EXPECT_EQ(p.s_nodes, (std::vector<NodeId>{1, 2}));
  EXPECT_EQ(p.cut_edges, (std::vector<EdgeId>{2}));
  const std::vector<std::uint8_t> y{1, 1, 1, 0};
  EXPECT_EQ(make_partition(net, w, y).s_nodes, (std::vector<NodeId>{4}));
}

TEST(BruteForce, SmallExamples) {
  {
    const Partition p = brute_force_bisection(BisectionProblem(cycle_graph(4)));
    EXPECT_EQ(p.cut_cost, 2.0);
    EXPECT_EQ(p.s_nodes, (std::vector<NodeId>{1, 2}));
  }
  {
    const Partition p = brute_force_bisection(BisectionProblem(path_graph(4)));
    EXPECT_EQ(p.cut_cost, 1.0);
    EXPECT_EQ(p.s_nodes, (std::vector<NodeId>{1, 2}));
  }
  {
    const Partition p = brute_force_bisection(BisectionProblem(path_graph(5), BisectionMode::Lexicographic));
    EXPECT_EQ(p.cut_cost, 1.0);
    EXPECT_EQ(p.s_nodes, (std::vector<NodeId>{1, 2}));
  }
  {
    const Partition p = brute_force_bisection(BisectionProblem(path_graph(2)));
    EXPECT_EQ(p.cut_cost, 1.0);
    EXPECT_EQ(p.s_size(), 1u);
  }
  {
    const Partition p = brute_force_bisection(BisectionProblem(star_graph(4)));
    EXPECT_EQ(p.s_size(), 2u);
    EXPECT_EQ(p.cut_cost, 2.0);
    EXPECT_EQ(p.s_nodes, (std::vector<NodeId>{2, 3}));
  }
  EXPECT_THROW(brute_force_bisection(BisectionProblem(path_graph(21))), std::invalid_argument);
}

TEST(BruteForce, TieBreakPrefersLargerS) {
  // P5 under GP with gamma=0.2 allows |S| in {2}; with gamma 0.45 allows 1..2.
  const Partition p = brute_force_bisection(BisectionProblem(path_graph(5), BisectionMode::GoalProgramming, 0.45));
  EXPECT_EQ(p.cut_cost, 1.0);
  EXPECT_EQ(p.s_size(), 2u);
}

TEST(GroupComponents, SplitsAlongComponents) {
  const Network net = make_network(6, {{1, 2}, {2, 3}, {4, 5}, {5, 6}});
  const std::vector<double> w(4, 1.0);
  const Partition p = group_components(net, w, size_window(6, BisectionMode::GoalProgramming, 0.1));
  EXPECT_EQ(p.cut_cost, 0.0);
  EXPECT_TRUE(p.cut_edges.empty());
  EXPECT_EQ(p.s_nodes, (std::vector<NodeId>{1, 2, 3}));

  const Network uneven = make_network(6, {{1, 2}, {3, 4}, {4, 5}, {5, 6}});
  const std::vector<double> w2(4, 1.0);
  const Partition q = group_components(uneven, w2, size_window(6, BisectionMode::GoalProgramming, 0.1));
  EXPECT_EQ(q.s_nodes, (std::vector<NodeId>{1, 2}));  // nearest feasible size
}
