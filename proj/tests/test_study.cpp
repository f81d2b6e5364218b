#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "leakloc/error.hpp"
#include "leakloc/matrices.hpp"
#include "leakloc/study.hpp"
#include "test_support.hpp"

using namespace leakloc;
using namespace leakloc::testing;

TEST(Summarize, SmallLists) {
  const std::vector<std::size_t> a{1, 2, 2, 3};
  const Summary s = summarize(a);
  EXPECT_EQ(s.mean, 2.0);
  EXPECT_EQ(s.median, 2.0);
  EXPECT_EQ(s.mode, 2.0);
  EXPECT_EQ(s.max, 3.0);
  EXPECT_NEAR(s.std, std::sqrt(2.0 / 3.0), 1e-12);

  const std::vector<std::size_t> one{5};
  const Summary t = summarize(one);
  EXPECT_EQ(t.mean, 5.0);
  EXPECT_EQ(t.median, 5.0);
  EXPECT_EQ(t.mode, 5.0);
  EXPECT_EQ(t.max, 5.0);
  EXPECT_EQ(t.std, 0.0);

  const std::vector<std::size_t> tie{4, 1, 4, 1, 9, 2};
  const Summary u = summarize(tie);
  EXPECT_EQ(u.mode, 1.0);    // smallest of the most frequent
  EXPECT_EQ(u.median, 2.0);  // lower middle of 1 1 2 4 4 9
  EXPECT_THROW(summarize(std::vector<std::size_t>{}), std::invalid_argument);
}

TEST(NetworkStats, GridAndCompleteGraph) {
  const NetworkStats g = network_stats(grid_graph(20, 20));
  EXPECT_EQ(g.n, 400u);
  EXPECT_EQ(g.m, 760u);
  EXPECT_EQ(g.max_degree, 4u);
  EXPECT_DOUBLE_EQ(g.mean_degree, 2.0 * 760 / 400);
  EXPECT_DOUBLE_EQ(g.q, 2.0 * 760 / (400.0 * 399.0));
  EXPECT_DOUBLE_EQ(network_stats(complete_graph(6)).q, 1.0);
}

TEST(Generators, Shapes) {
  EXPECT_EQ(path_graph(5).m(), 4u);
  EXPECT_EQ(cycle_graph(5).m(), 5u);
  const Network lol = lollipop_graph(4, 3);
  EXPECT_EQ(lol.n(), 7u);
  EXPECT_EQ(lol.m(), 6u + 3u);
  EXPECT_EQ(generate_graph("grid:3x4").n(), 12u);
  EXPECT_EQ(generate_graph("lollipop:4:3"), lol);
  EXPECT_THROW(generate_graph("torus:3"), InvalidNetwork);
  EXPECT_THROW(generate_graph("grid:3"), InvalidNetwork);
  for (const Network& net : {grid_graph(4, 5), path_graph(6), lollipop_graph(5, 2)})
    EXPECT_EQ(net.net_boundary_flow(), 0.0);
}

TEST(Generators, RandomIsDeterministicAndConnected) {
  for (std::uint64_t seed : {1u, 2u, 3u, 99u}) {
    const Network a = random_connected_graph(30, 0.1, seed);
    EXPECT_EQ(a, random_connected_graph(30, 0.1, seed));
    EXPECT_EQ(connected_components(a).size(), 1u);
    EXPECT_GE(a.m(), 29u);
  }
  EXPECT_NE(random_connected_graph(30, 0.1, 1), random_connected_graph(30, 0.1, 2));
  Rng a(5), b(5);
  for (int k = 0; k < 100; ++k) EXPECT_EQ(a.next(), b.next());
  Rng r(6);
  for (int k = 0; k < 1000; ++k) {
    const double u = r.uniform();
    EXPECT_TRUE(u >= 0.0 && u < 1.0);
    EXPECT_LT(r.below(7), 7u);
    const long long v = r.between(-2, 2);
    EXPECT_TRUE(v >= -2 && v <= 2);
  }
}

TEST(EnumerativeStudy, PathOfFour) {
  const StudyResult r = enumerative_study(path_graph(4), StudyOptions{}, "P4");
  ASSERT_EQ(r.per_scenario.size(), 4u);
  for (const ScenarioResult& s : r.per_scenario) {
    EXPECT_EQ(s.query_count, 2u);
    EXPECT_TRUE(s.found);
    EXPECT_EQ(s.leaky_set_size, 1u);
  }
  EXPECT_EQ(r.summary.max, 2.0);
  EXPECT_EQ(r.summary.mean, 2.0);
  EXPECT_EQ(r.network_name, "P4");
}

TEST(EnumerativeStudy, SingleEdge) {
  const StudyResult r = enumerative_study(path_graph(2), StudyOptions{});
  ASSERT_EQ(r.per_scenario.size(), 2u);
  for (const ScenarioResult& s : r.per_scenario) {
    EXPECT_EQ(s.total_cost, 1.0);
    EXPECT_EQ(s.query_count, 1u);
  }
}

TEST(EnumerativeStudy, PipeModeVisitsEveryEdge) {
  StudyOptions opts;
  opts.config.mode = LeakMode::Pipe;
  const Network net = grid_graph(3, 3);
  const StudyResult r = enumerative_study(net, opts);
  ASSERT_EQ(r.per_scenario.size(), net.m());
  for (const ScenarioResult& s : r.per_scenario) EXPECT_TRUE(s.found) << site_label(s.site);
  EXPECT_EQ(site_label(r.per_scenario[0].site), "pipe:1@0.5");
}

TEST(EnumerativeStudy, ParallelMatchesSerialAndIsRepeatable) {
  Rng rng(17);
  for (int trial = 0; trial < 4; ++trial) {
    const Network net = random_weighted_graph(rng, 25 + rng.below(15), 0.1);
    for (PartitionMethod method : {PartitionMethod::IlpGoalProgramming, PartitionMethod::Spectral}) {
      StudyOptions opts;
      opts.config.method = method;
      opts.threads = 4;
      const StudyResult par = enumerative_study(net, opts);
      const StudyResult ser = enumerative_study_serial(net, opts);
      const StudyResult again = enumerative_study(net, opts);
      ASSERT_EQ(par.per_scenario.size(), ser.per_scenario.size());
      for (std::size_t k = 0; k < par.per_scenario.size(); ++k) {
        EXPECT_EQ(par.per_scenario[k].site, ser.per_scenario[k].site);
        EXPECT_EQ(par.per_scenario[k].query_count, ser.per_scenario[k].query_count);
        EXPECT_EQ(par.per_scenario[k].total_cost, ser.per_scenario[k].total_cost);
        EXPECT_EQ(par.per_scenario[k].query_count, again.per_scenario[k].query_count);
        EXPECT_TRUE(par.per_scenario[k].found);
      }
      EXPECT_EQ(par.summary.mean, ser.summary.mean);
      EXPECT_EQ(par.summary.std, ser.summary.std);
    }
  }
}

TEST(EnumerativeStudy, CacheDoesNotChangeResults) {
  const Network net = grid_graph(5, 5);
  StudyOptions cached, uncached;
  uncached.cache_partitions = false;
  const StudyResult a = enumerative_study(net, cached);
  const StudyResult b = enumerative_study(net, uncached);
  for (std::size_t k = 0; k < a.per_scenario.size(); ++k)
    EXPECT_EQ(a.per_scenario[k].query_count, b.per_scenario[k].query_count);

  PartitionCache cache;
  const BisectionProblem problem(net);
  const Partition p = cache.get_or_compute(problem, PartitionMethod::IlpGoalProgramming, CampaignConfig{});
  EXPECT_EQ(cache.get_or_compute(problem, PartitionMethod::IlpGoalProgramming, CampaignConfig{}), p);
  EXPECT_EQ(cache.size(), 1u);
  EXPECT_EQ(cache.hits(), 1u);
  cache.get_or_compute(problem, PartitionMethod::Spectral, CampaignConfig{});
  EXPECT_EQ(cache.size(), 2u);
}

TEST(Reports, SummaryTableLayout) {
  StudyResult a;
  a.network_name = "grid-5x5";
  a.summary = {12.76, 13, 13, 15, 1.2345};
  StudyResult b;
  b.network_name = "P4";
  b.summary = {2, 2, 2, 2, 0};
  const std::vector<StudyResult> rows{a, b};
  std::ostringstream table;
  write_summary_table(table, rows);
  EXPECT_EQ(table.str(),
            "Network  | mean   | median | mode | max | std\n"
            "---------|--------|--------|------|-----|------\n"
            "grid-5x5 |  12.76 |     13 |   13 |  15 | 1.23\n"
            "P4       |   2.00 |      2 |    2 |   2 | 0.00\n");
  std::ostringstream csv;
  write_summary_csv(csv, rows);
  EXPECT_EQ(csv.str(), "Network,mean,median,mode,max,std\ngrid-5x5,12.76,13,13,15,1.2345\nP4,2,2,2,2,0\n");
}

TEST(Reports, ScenarioCsvAndJson) {
  const StudyResult r = enumerative_study(path_graph(3), StudyOptions{}, "P3");
  std::ostringstream csv;
  write_scenarios_csv(csv, r);
  std::istringstream lines(csv.str());
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header, "site,query_count,total_cost,stages,found,leaky_set_size");
  std::size_t rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  EXPECT_EQ(rows, 3u);
  std::ostringstream js;
  write_study_json(js, r);
  EXPECT_NE(js.str().find("\"network\": \"P3\""), std::string::npos);
  EXPECT_NE(js.str().find("\"summary\""), std::string::npos);
}
