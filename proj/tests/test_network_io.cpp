#include <gtest/gtest.h>

#include "leakloc/error.hpp"
#include "leakloc/network_io.hpp"
#include "test_support.hpp"

using namespace leakloc;
using namespace leakloc::testing;

TEST(JsonFormat, MinimalNetwork) {
  const char* doc = R"({"nodes":[{"id":1,"kind":"source","boundary_flow":5},{"id":2,"kind":"demand","boundary_flow":-5}],
                       "edges":[{"id":1,"i":1,"j":2,"query_cost":1}]})";
  const Network net = load_network(doc, NetworkFormat::Json);
  EXPECT_EQ(net.n(), 2u);
  EXPECT_EQ(net.m(), 1u);
}

TEST(JsonFormat, RoundTrip) {
  const Network net = load_network_file(data_path("two_source_network.json"), NetworkFormat::Json);
  EXPECT_EQ(network_from_json(network_to_json(net)), net);
  EXPECT_DOUBLE_EQ(net.net_boundary_flow(), 1.0);
}

TEST(JsonFormat, Errors) {
  EXPECT_THROW(load_network(R"({"nodes":[{"id":1}],"edges":[{"id":1,"i":1,"j":99}]})", NetworkFormat::Json),
               InvalidNetwork);
  try {
    load_network("{\n\"nodes\": [\n{\"id\": 1,,}\n]}", NetworkFormat::Json);
    FAIL() << "malformed JSON accepted";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(load_network(R"({"edges":[]})", NetworkFormat::Json), ParseError);
  EXPECT_THROW(load_network(R"({"nodes":[{"id":1,"kind":"pump"}]})", NetworkFormat::Json), Error);
  EXPECT_THROW(load_network(R"({"nodes":[{"id":1,"kind":"transmission","boundary_flow":3}]})", NetworkFormat::Json),
               InvalidNetwork);
}

TEST(InpFormat, FourJunctionsOneReservoir) {
  std::vector<std::string> warnings;
  const Network net = load_network_file(data_path("small.inp"), NetworkFormat::Inp, &warnings);
  EXPECT_EQ(net.n(), 5u);
  EXPECT_EQ(net.m(), 5u);
  ASSERT_EQ(warnings.size(), 2u);  // TITLE and OPTIONS are skipped
  EXPECT_NE(warnings[0].find("TITLE"), std::string::npos);

  auto by_label = [&](const std::string& label) -> const Node& {
    for (const Node& v : net.nodes())
      if (v.label == label) return v;
    throw std::runtime_error("missing " + label);
  };
  EXPECT_EQ(by_label("R1").kind, NodeKind::Source);
  EXPECT_DOUBLE_EQ(by_label("R1").boundary_flow, 7.0);
  EXPECT_DOUBLE_EQ(by_label("J4").boundary_flow, -0.5);
  EXPECT_EQ(by_label("J4").kind, NodeKind::Demand);
  EXPECT_DOUBLE_EQ(net.net_boundary_flow(), 0.0);
  EXPECT_DOUBLE_EQ(*by_label("J3").x, 1.0);
}

TEST(InpFormat, ValvesPumpsAndErrors) {
  const char* inp =
      "[JUNCTIONS]\n A 0 1\n B 0 0\n[TANKS]\n T 0\n[PUMPS]\n PU T A HEAD c1\n[VALVES]\n V1 A B 100 PRV 5\n";
  const Network net = load_network(inp, NetworkFormat::Inp);
  EXPECT_EQ(net.m(), 2u);
  int valves = 0;
  for (const Edge& e : net.edges()) valves += e.has_valve;
  EXPECT_EQ(valves, 1);
  EXPECT_EQ(net.node(2).kind, NodeKind::Transmission);

  try {
    load_network("[JUNCTIONS]\n A 0 1\n[PIPES]\n P1 A Z 10 10 10\n", NetworkFormat::Inp);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
    EXPECT_NE(std::string(e.what()).find("dangling endpoint"), std::string::npos);
  }
  EXPECT_THROW(load_network("[JUNCTIONS]\n A 0 x\n", NetworkFormat::Inp), ParseError);
  EXPECT_THROW(load_network("[JUNCTIONS]\n A 0\n A 1\n", NetworkFormat::Inp), ParseError);
  EXPECT_THROW(network_format_from_string("xml"), ParseError);
}
