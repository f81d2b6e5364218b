#include "leakloc/protocol_json.hpp"

#include <string>

#include "leakloc/error.hpp"
#include "leakloc/network_io.hpp"

namespace leakloc {

using nlohmann::json;

namespace {

template <typename T>
T get_or(const json& doc, const char* key, T fallback) {
  auto it = doc.find(key);
  return it == doc.end() || it->is_null() ? fallback : it->get<T>();
}

std::string_view to_string(WeightRule rule) { return rule == WeightRule::Literal ? "literal" : "sqrt"; }

WeightRule weight_rule_from_string(std::string_view text) {
  if (text == "literal") return WeightRule::Literal;
  if (text == "sqrt") return WeightRule::SqrtWeights;
  throw ParseError("unknown weight rule '" + std::string(text) + "'");
}

template <typename F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& ex) {
    throw ParseError(std::string(what) + ": " + ex.what());
  }
}

}  // namespace

json to_json(const CampaignConfig& c) {
  return {{"method", to_string(c.method)},
          {"gamma", c.gamma},
          {"delta", c.delta},
          {"mode", to_string(c.mode)},
          {"pipe_strategy", to_string(c.pipe_strategy)},
          {"multi_leak", c.multi_leak},
          {"sensor_integration", c.sensor_integration},
          {"disruptive_valves", c.disruptive_valves},
          {"tolerance", c.tolerance},
          {"ilp_node_budget", c.ilp_node_budget},
          {"spectral_rule", to_string(c.spectral_rule)}};
}

CampaignConfig config_from_json(const json& doc) {
  return guarded("campaign config", [&] {
    CampaignConfig c;
    if (!doc.is_object()) throw ParseError("campaign config must be an object");
    c.method = partition_method_from_string(get_or<std::string>(doc, "method", "ilp-gp"));
    c.gamma = get_or(doc, "gamma", c.gamma);
    c.delta = get_or(doc, "delta", c.delta);
    c.mode = leak_mode_from_string(get_or<std::string>(doc, "mode", "node"));
    c.pipe_strategy = pipe_strategy_from_string(get_or<std::string>(doc, "pipe_strategy", "center-split"));
    c.multi_leak = get_or(doc, "multi_leak", c.multi_leak);
    c.sensor_integration = get_or(doc, "sensor_integration", c.sensor_integration);
    c.disruptive_valves = get_or(doc, "disruptive_valves", c.disruptive_valves);
    c.tolerance = get_or(doc, "tolerance", c.tolerance);
    c.ilp_node_budget = get_or(doc, "ilp_node_budget", c.ilp_node_budget);
    c.spectral_rule = weight_rule_from_string(get_or<std::string>(doc, "spectral_rule", "literal"));
    return c;
  });
}

json to_json(const MeasurementPoint& p) {
  if (p.kind == PointKind::Center) return {{"kind", "center"}};
  return {{"kind", "near_node"}, {"node", p.node}};
}

MeasurementPoint point_from_json(const json& doc) {
  return guarded("measurement point", [&] {
    const std::string kind = doc.at("kind").get<std::string>();
    if (kind == "center") return MeasurementPoint{PointKind::Center, 0};
    if (kind == "near_node") return MeasurementPoint{PointKind::NearNode, doc.at("node").get<NodeId>()};
    throw ParseError("unknown measurement point '" + kind + "'");
  });
}

json to_json(const FlowReading& r) {
  return {{"edge", r.edge},         {"point", to_json(r.point)}, {"value", r.value},
          {"cost_charged", r.cost_charged}, {"stage", r.stage},         {"measured", r.measured}};
}

FlowReading reading_from_json(const json& doc) {
  return guarded("flow reading", [&] {
    FlowReading r;
    r.edge = doc.at("edge").get<EdgeId>();
    r.point = doc.contains("point") ? point_from_json(doc.at("point")) : MeasurementPoint{};
    r.value = doc.at("value").get<double>();
    r.cost_charged = get_or(doc, "cost_charged", 0.0);
    r.stage = get_or<std::size_t>(doc, "stage", 0);
    r.measured = get_or(doc, "measured", true);
    return r;
  });
}

json to_json(const Partition& p) {
  return {{"s", p.s_nodes}, {"sbar", p.sbar_nodes}, {"cut_edges", p.cut_edges}, {"cut_cost", p.cut_cost}};
}

Partition partition_from_json(const json& doc) {
  return guarded("partition", [&] {
    Partition p;
    p.s_nodes = doc.at("s").get<std::vector<NodeId>>();
    p.sbar_nodes = doc.at("sbar").get<std::vector<NodeId>>();
    p.cut_edges = doc.at("cut_edges").get<std::vector<EdgeId>>();
    p.cut_cost = doc.at("cut_cost").get<double>();
    return p;
  });
}

json to_json(const QueryPlan& plan) {
  json required = json::array();
  for (const RequiredReading& r : plan.required_readings)
    required.push_back({{"edge", r.edge}, {"point", to_json(r.point)}, {"cost", r.cost}});
  json known = json::array();
  for (const KnownReading& k : plan.known_readings)
    known.push_back({{"edge", k.edge}, {"point", to_json(k.point)}, {"value", k.value}});
  return {{"stage", plan.stage},
          {"partition", to_json(plan.partition)},
          {"component_split", plan.component_split},
          {"required_readings", std::move(required)},
          {"known_readings", std::move(known)},
          {"planned_cost", plan.planned_cost}};
}

QueryPlan plan_from_json(const json& doc) {
  return guarded("query plan", [&] {
    QueryPlan plan;
    plan.stage = doc.at("stage").get<std::size_t>();
    plan.partition = partition_from_json(doc.at("partition"));
    plan.component_split = get_or(doc, "component_split", false);
    for (const json& r : doc.at("required_readings"))
      plan.required_readings.push_back({r.at("edge").get<EdgeId>(), point_from_json(r.at("point")), r.at("cost").get<double>()});
    for (const json& k : doc.at("known_readings"))
      plan.known_readings.push_back({k.at("edge").get<EdgeId>(), point_from_json(k.at("point")), k.at("value").get<double>()});
    plan.planned_cost = doc.at("planned_cost").get<double>();
    return plan;
  });
}

json to_json(const Finding& f) {
  if (f.kind == Finding::Kind::Node) return {{"kind", "node"}, {"node", f.node}, {"imbalance", f.imbalance}};
  return {{"kind", "segment"}, {"pipe", f.pipe},           {"from", f.from},
          {"to", f.to},        {"edge", f.working_edge}, {"imbalance", f.imbalance}};
}

Finding finding_from_json(const json& doc) {
  return guarded("finding", [&] {
    Finding f;
    const std::string kind = doc.at("kind").get<std::string>();
    f.imbalance = doc.at("imbalance").get<double>();
    if (kind == "node") {
      f.kind = Finding::Kind::Node;
      f.node = doc.at("node").get<NodeId>();
    } else if (kind == "segment") {
      f.kind = Finding::Kind::Segment;
      f.pipe = doc.at("pipe").get<EdgeId>();
      f.from = doc.at("from").get<double>();
      f.to = doc.at("to").get<double>();
      f.working_edge = doc.at("edge").get<EdgeId>();
    } else {
      throw ParseError("unknown finding kind '" + kind + "'");
    }
    return f;
  });
}

json to_json(const CampaignState& s) {
  json segments = json::array();
  for (const auto& [edge, info] : s.segments)
    segments.push_back(
        {{"edge", edge}, {"origin", info.origin}, {"from", info.from}, {"to", info.to}, {"from_node", info.from_node}});
  json branches = json::array();
  for (const Branch& b : s.branches)
    branches.push_back({{"candidate", network_to_json(b.candidate)}, {"imbalance", b.imbalance}});
  json leaky = json::array();
  for (const Finding& f : s.leaky_set) leaky.push_back(to_json(f));
  json log = json::array();
  for (const FlowReading& r : s.query_log) log.push_back(to_json(r));
  return {{"schema", kCampaignSchema},
          {"config", to_json(s.config)},
          {"base", network_to_json(s.base)},
          {"tolerance", s.tolerance},
          {"segments", std::move(segments)},
          {"next_node_id", s.next_node_id},
          {"next_edge_id", s.next_edge_id},
          {"branches", std::move(branches)},
          {"leaky_set", std::move(leaky)},
          {"query_log", std::move(log)},
          {"total_cost", s.total_cost},
          {"stage", s.stage},
          {"version", s.version},
          {"complete", s.complete()}};
}

CampaignState state_from_json(const json& doc) {
  return guarded("campaign state", [&] {
    if (doc.value("schema", "") != kCampaignSchema) throw ParseError("unsupported campaign schema");
    CampaignState s;
    s.config = config_from_json(doc.at("config"));
    s.base = network_from_json(doc.at("base"));
    s.tolerance = doc.at("tolerance").get<double>();
    for (const json& j : doc.at("segments"))
      s.segments[j.at("edge").get<EdgeId>()] = SegmentInfo{j.at("origin").get<EdgeId>(), j.at("from").get<double>(),
                                                           j.at("to").get<double>(), j.at("from_node").get<NodeId>()};
    s.next_node_id = doc.at("next_node_id").get<NodeId>();
    s.next_edge_id = doc.at("next_edge_id").get<EdgeId>();
    for (const json& b : doc.at("branches"))
      s.branches.push_back({network_from_json(b.at("candidate")), b.at("imbalance").get<double>()});
    for (const json& f : doc.at("leaky_set")) s.leaky_set.push_back(finding_from_json(f));
    for (const json& r : doc.at("query_log")) s.query_log.push_back(reading_from_json(r));
    s.total_cost = doc.at("total_cost").get<double>();
    s.stage = doc.at("stage").get<std::size_t>();
    s.version = doc.at("version").get<std::uint64_t>();
    return s;
  });
}

json to_json(const LeakScenario& scenario) {
  json leaks = json::array();
  for (const ScenarioLeak& l : scenario.leaks) {
    if (const auto* n = std::get_if<NodeSite>(&l.site))
      leaks.push_back({{"node", n->node}, {"magnitude", l.magnitude}});
    else {
      const auto& p = std::get<PipeSite>(l.site);
      leaks.push_back({{"edge", p.edge}, {"fraction", p.fraction}, {"magnitude", l.magnitude}});
    }
  }
  return {{"leaks", std::move(leaks)}};
}

LeakScenario scenario_from_json(const json& doc) {
  return guarded("leak scenario", [&] {
    LeakScenario s;
    for (const json& l : doc.at("leaks")) {
      ScenarioLeak leak;
      leak.magnitude = get_or(l, "magnitude", 1.0);
      if (l.contains("node")) leak.site = NodeSite{l.at("node").get<NodeId>()};
      else leak.site = PipeSite{l.at("edge").get<EdgeId>(), get_or(l, "fraction", 0.5)};
      s.leaks.push_back(leak);
    }
    return s;
  });
}

}  // namespace leakloc
