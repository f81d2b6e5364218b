#include "leakloc/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <string>
#include <unordered_set>

#include "leakloc/error.hpp"
#include "leakloc/matrices.hpp"

namespace leakloc {

std::string_view to_string(PartitionMethod method) {
  switch (method) {
    case PartitionMethod::IlpGoalProgramming: return "ilp-gp";
    case PartitionMethod::IlpLexicographic: return "ilp-lex";
    case PartitionMethod::Spectral: return "spectral";
  }
  return "?";
}

PartitionMethod partition_method_from_string(std::string_view text) {
  if (text == "ilp-gp") return PartitionMethod::IlpGoalProgramming;
  if (text == "ilp-lex") return PartitionMethod::IlpLexicographic;
  if (text == "spectral") return PartitionMethod::Spectral;
  throw Error("unknown partition method '" + std::string(text) + "'");
}

std::string_view to_string(LeakMode mode) { return mode == LeakMode::Node ? "node" : "pipe"; }

LeakMode leak_mode_from_string(std::string_view text) {
  if (text == "node") return LeakMode::Node;
  if (text == "pipe") return LeakMode::Pipe;
  throw Error("unknown leak mode '" + std::string(text) + "'");
}

std::string_view to_string(PipeStrategy strategy) {
  return strategy == PipeStrategy::CenterSplit ? "center-split" : "double-ended";
}

PipeStrategy pipe_strategy_from_string(std::string_view text) {
  if (text == "center-split") return PipeStrategy::CenterSplit;
  if (text == "double-ended") return PipeStrategy::DoubleEnded;
  throw Error("unknown pipe strategy '" + std::string(text) + "'");
}

double LeakScenario::total_magnitude() const {
  double total = 0.0;
  for (const ScenarioLeak& leak : leaks) total += leak.magnitude;
  return total;
}

bool Finding::contains(const LeakLocation& site) const {
  if (const auto* n = std::get_if<NodeSite>(&site)) return kind == Kind::Node && node == n->node;
  const auto& p = std::get<PipeSite>(site);
  constexpr double slack = 1e-12;
  return kind == Kind::Segment && pipe == p.edge && p.fraction >= from - slack && p.fraction <= to + slack;
}

const Network& CampaignState::candidate() const {
  if (branches.empty()) throw CampaignComplete("campaign complete");
  return branches.back().candidate;
}

std::size_t candidate_size(const Network& net, LeakMode mode) {
  std::size_t actual = 0;
  for (const Node& v : net.nodes())
    if (v.kind != NodeKind::Artificial) ++actual;
  return mode == LeakMode::Node ? actual : actual + net.m();
}

namespace {

SegmentInfo segment_of(const CampaignState& state, const Edge& e) {
  if (auto it = state.segments.find(e.id); it != state.segments.end()) return it->second;
  return SegmentInfo{e.id, 0.0, 1.0, e.i};
}

double tolerance_for(const Network& net, const CampaignConfig& config) {
  return config.tolerance > 0.0 ? config.tolerance : default_tolerance(net.total_production());
}

std::vector<Finding> findings_for(const CampaignState& state, const Network& region, double imbalance) {
  std::vector<Finding> out;
  for (const Node& v : region.nodes()) {
    if (v.kind == NodeKind::Artificial) continue;
    Finding f;
    f.kind = Finding::Kind::Node;
    f.node = v.id;
    f.imbalance = imbalance;
    out.push_back(f);
  }
  if (state.config.mode == LeakMode::Pipe) {
    for (const Edge& e : region.edges()) {
      const SegmentInfo info = segment_of(state, e);
      Finding f;
      f.kind = Finding::Kind::Segment;
      f.pipe = info.origin;
      f.from = info.from;
      f.to = info.to;
      f.working_edge = e.id;
      f.imbalance = imbalance;
      out.push_back(f);
    }
  }
  return out;
}

enum class CutKind { Plain, SplitCenter, HalfNear, BothEnds };

struct CutTreatment {
  CutKind kind = CutKind::Plain;
  std::vector<RequiredReading> required;
  std::vector<KnownReading> known;
  double charge = 0.0;       // cost of the required readings
  double base_charge = 0.0;  // cost ignoring sensors and valves
  NodeId actual_end = 0;     // HalfNear
};

/// What it takes to learn the flow across a candidate edge once it is cut.
CutTreatment treat_cut(const CampaignState& state, const Network& cand, const Edge& e) {
  const CampaignConfig& cfg = state.config;
  const bool shut = cfg.disruptive_valves && e.has_valve;
  const bool is_half = state.segments.contains(e.id);
  CutTreatment t;
  auto known_or_required = [&](MeasurementPoint point, std::optional<double> known) {
    t.base_charge += e.query_cost;
    if (known) {
      t.known.push_back({e.id, point, *known});
    } else {
      t.required.push_back({e.id, point, e.query_cost});
      t.charge += e.query_cost;
    }
  };
  std::optional<double> free_value = e.known_flow;
  if (!free_value && shut) free_value = 0.0;

  if (cfg.mode == LeakMode::Node) {
    t.kind = CutKind::Plain;
    known_or_required({PointKind::Center, 0}, free_value);
  } else if (cfg.pipe_strategy == PipeStrategy::DoubleEnded) {
    t.kind = CutKind::BothEnds;
    known_or_required({PointKind::NearNode, e.i}, free_value);
    known_or_required({PointKind::NearNode, e.j}, free_value);
  } else if (!is_half) {
    t.kind = CutKind::SplitCenter;
    known_or_required({PointKind::Center, 0}, free_value);
  } else {
    t.kind = CutKind::HalfNear;
    const bool i_artificial = cand.node(e.i).kind == NodeKind::Artificial;
    t.actual_end = i_artificial ? e.j : e.i;
    // The known flow of a half-pipe sits at its artificial end.
    known_or_required({PointKind::NearNode, t.actual_end}, shut ? std::optional<double>(0.0) : std::nullopt);
  }
  return t;
}

std::vector<double> partition_weights(const CampaignState& state, const Network& cand) {
  std::vector<double> w;
  w.reserve(cand.m());
  for (const Edge& e : cand.edges()) {
    const CutTreatment t = treat_cut(state, cand, e);
    w.push_back(state.config.sensor_integration ? t.charge : t.base_charge);
  }
  return w;
}

struct PlanReadings {
  std::vector<RequiredReading> required;
  std::vector<KnownReading> known;
  double planned_cost = 0.0;
};

PlanReadings readings_for(const CampaignState& state, const Network& cand, const Partition& p) {
  PlanReadings out;
  for (EdgeId id : p.cut_edges) {
    CutTreatment t = treat_cut(state, cand, cand.edge(id));
    out.planned_cost += t.charge;
    out.required.insert(out.required.end(), t.required.begin(), t.required.end());
    out.known.insert(out.known.end(), t.known.begin(), t.known.end());
  }
  return out;
}

void check_partition(const Network& cand, const Partition& p) {
  std::vector<NodeId> all;
  all.reserve(p.s_nodes.size() + p.sbar_nodes.size());
  all.insert(all.end(), p.s_nodes.begin(), p.s_nodes.end());
  all.insert(all.end(), p.sbar_nodes.begin(), p.sbar_nodes.end());
  std::sort(all.begin(), all.end());
  if (all != cand.node_ids() || p.s_nodes.empty() || p.sbar_nodes.empty())
    throw ReadingMismatch("plan does not partition the current candidate");
  std::unordered_set<NodeId> in_s(p.s_nodes.begin(), p.s_nodes.end());
  std::vector<EdgeId> cut;
  for (const Edge& e : cand.edges())
    if (in_s.contains(e.i) != in_s.contains(e.j)) cut.push_back(e.id);
  if (cut != p.cut_edges) throw ReadingMismatch("plan cut set does not match its partition");
}

struct SplitRecord {
  EdgeId edge = 0;
  NodeId artificial = 0;
  NodeId from_end = 0, other_end = 0;
  EdgeId half_from = 0, half_other = 0;  // touching from_end / other_end
  double known_from = 0.0, known_other = 0.0;
};

/// Splits every listed edge of `cand` at its center, registering the halves
/// in `state`. Values are center readings in each edge's convention.
Network split_edges(CampaignState& state, const Network& cand, const std::vector<std::pair<EdgeId, double>>& cuts,
                    std::vector<SplitRecord>& records) {
  std::vector<Node> nodes(cand.nodes().begin(), cand.nodes().end());
  std::set<EdgeId> removed;
  std::vector<Edge> added;
  for (const auto& [id, center] : cuts) {
    const Edge& e = cand.edge(id);
    const SegmentInfo info = segment_of(state, e);
    const NodeId fn = info.from_node;
    const NodeId other = fn == e.i ? e.j : e.i;
    const double along = e.i == fn ? center : -center;
    const double mid = 0.5 * (info.from + info.to);

    Node m;
    m.id = state.next_node_id++;
    m.kind = NodeKind::Artificial;
    m.label = "M" + std::to_string(m.id);
    const Node& a = cand.node(e.i);
    const Node& b = cand.node(e.j);
    if (a.x && b.x) m.x = 0.5 * (*a.x + *b.x);
    if (a.y && b.y) m.y = 0.5 * (*a.y + *b.y);
    nodes.push_back(m);

    Edge h1;
    h1.id = state.next_edge_id++;
    h1.i = fn;
    h1.j = m.id;
    h1.query_cost = e.query_cost;
    h1.known_flow = along;  // fn -> M runs along the pipe
    Edge h2 = h1;
    h2.id = state.next_edge_id++;
    h2.i = other;
    h2.known_flow = -along;
    state.segments[h1.id] = SegmentInfo{info.origin, info.from, mid, fn};
    state.segments[h2.id] = SegmentInfo{info.origin, mid, info.to, m.id};
    removed.insert(id);
    added.push_back(h1);
    added.push_back(h2);
    records.push_back({id, m.id, fn, other, h1.id, h2.id, *h1.known_flow, *h2.known_flow});
  }
  std::vector<Edge> edges;
  edges.reserve(cand.m() + added.size());
  for (const Edge& e : cand.edges())
    if (!removed.contains(e.id)) edges.push_back(e);
  edges.insert(edges.end(), added.begin(), added.end());
  return Network(std::move(nodes), std::move(edges));
}

using ReadingKey = std::pair<EdgeId, MeasurementPoint>;

struct SideAccumulator {
  std::vector<NodeId> members;
  std::map<NodeId, double> injections;
  double inflow = 0.0, outflow = 0.0;

  void cross(NodeId at, double into) {
    injections[at] += into;
    if (into > 0.0) inflow += into;
    else outflow -= into;
  }
};

EnvelopeBalance side_balance(const Network& net, const SideAccumulator& side) {
  double production = 0.0, consumption = 0.0;
  for (NodeId id : side.members) {
    const double b = net.node(id).boundary_flow;
    if (b > 0.0) production += b;
    else consumption -= b;
  }
  return make_balance(side.inflow, production, side.outflow, consumption);
}

EnvelopeBalance segment_balance(double loss) {
  return make_balance(std::max(loss, 0.0), 0.0, std::max(-loss, 0.0), 0.0);
}

Network prune_isolated_artificial(Network net) {
  std::vector<NodeId> keep;
  bool pruned = false;
  for (std::size_t v = 0; v < net.n(); ++v) {
    const Node& node = net.nodes()[v];
    if (node.kind == NodeKind::Artificial && net.degree(v) == 0) {
      pruned = true;
      continue;
    }
    keep.push_back(node.id);
  }
  return pruned ? subgraph(net, keep) : net;
}

}  // namespace

CampaignState start_campaign(const Network& net, const CampaignConfig& config, bool force) {
  if (config.delta < 1) throw Error("delta must be at least 1");
  if (config.gamma < 0.0 || config.gamma >= 0.5) throw Error("gamma must lie in [0, 0.5)");
  CampaignState state;
  state.config = config;
  state.base = net;
  state.tolerance = tolerance_for(net, config);
  state.next_node_id = net.max_node_id() + 1;
  state.next_edge_id = net.max_edge_id() + 1;
  // What the whole network loses: production minus consumption.
  const double lost = net.net_boundary_flow();
  if (std::abs(lost) <= state.tolerance && !force) throw NoLeakDetected("no leak detected");
  if (candidate_size(net, config.mode) <= config.delta) {
    state.leaky_set = findings_for(state, net, lost);
  } else {
    state.branches.push_back({net, lost});
  }
  return state;
}

Partition run_partitioner(const BisectionProblem& problem, PartitionMethod method, const CampaignConfig& config) {
  if (method == PartitionMethod::Spectral) {
    SpectralOptions opts;
    opts.rule = config.spectral_rule;
    return spectral_bisect(problem, opts).partition;
  }
  IlpOptions opts;
  opts.node_budget = config.ilp_node_budget;
  return solve_bisection(problem, opts);
}

QueryPlan plan_stage(const CampaignState& state, const PartitionProvider& partitioner) {
  if (state.complete()) throw CampaignComplete("campaign complete");
  const Network& cand = state.candidate();
  const CampaignConfig& cfg = state.config;
  const BisectionMode mode =
      cfg.method == PartitionMethod::IlpLexicographic ? BisectionMode::Lexicographic : BisectionMode::GoalProgramming;
  BisectionProblem problem(cand, partition_weights(state, cand), mode, cfg.gamma);

  QueryPlan plan;
  plan.stage = state.stage;
  if (connected_components(cand).size() > 1) {
    const std::vector<double> ones(cand.m(), 1.0);
    plan.partition = group_components(cand, ones, problem.window());
    plan.partition.cut_cost = 0.0;
    plan.component_split = true;
  } else if (partitioner) {
    plan.partition = partitioner(problem, cfg.method, cfg);
  } else {
    plan.partition = run_partitioner(problem, cfg.method, cfg);
  }
  PlanReadings r = readings_for(state, cand, plan.partition);
  plan.required_readings = std::move(r.required);
  plan.known_readings = std::move(r.known);
  plan.planned_cost = r.planned_cost;
  return plan;
}

QueryPlan plan_stage(const CampaignState& state, PartitionMethod method, double gamma) {
  CampaignState copy = state;
  copy.config.method = method;
  copy.config.gamma = gamma;
  return plan_stage(copy);
}

CampaignState apply_readings(const CampaignState& state, const QueryPlan& plan, std::span<const FlowReading> readings,
                             StageOutcome* outcome) {
  if (state.complete()) throw CampaignComplete("campaign complete");
  if (plan.stage != state.stage) throw ReadingMismatch("plan belongs to a different stage");
  const Network& cand = state.candidate();
  check_partition(cand, plan.partition);
  const PlanReadings expected = readings_for(state, cand, plan.partition);
  if (expected.required != plan.required_readings || expected.known != plan.known_readings)
    throw ReadingMismatch("plan is stale for the current candidate");

  std::map<ReadingKey, double> values;
  std::map<ReadingKey, double> charges;
  for (const RequiredReading& r : expected.required) charges[{r.edge, r.point}] = r.cost;
  for (const FlowReading& r : readings) {
    const ReadingKey key{r.edge, r.point};
    if (!charges.contains(key))
      throw ReadingMismatch("reading for edge " + std::to_string(r.edge) + " was not requested");
    if (!std::isfinite(r.value)) throw ReadingMismatch("reading for edge " + std::to_string(r.edge) + " is not finite");
    if (!values.emplace(key, r.value).second)
      throw ReadingMismatch("duplicate reading for edge " + std::to_string(r.edge));
  }
  for (const RequiredReading& r : expected.required)
    if (!values.contains({r.edge, r.point}))
      throw ReadingMismatch("missing reading for edge " + std::to_string(r.edge));
  for (const KnownReading& k : expected.known) values[{k.edge, k.point}] = k.value;

  CampaignState next = state;
  const Branch parent = next.branches.back();
  next.branches.pop_back();

  std::unordered_set<NodeId> in_s(plan.partition.s_nodes.begin(), plan.partition.s_nodes.end());
  SideAccumulator sides[2];
  sides[0].members = plan.partition.s_nodes;
  sides[1].members = plan.partition.sbar_nodes;
  auto side_of = [&](NodeId v) { return in_s.contains(v) ? 0 : 1; };

  struct SegmentEnvelope {
    Finding finding;
    EnvelopeBalance balance;
  };
  std::vector<SegmentEnvelope> segment_envelopes;
  std::vector<std::pair<EdgeId, double>> to_split;

  for (EdgeId id : plan.partition.cut_edges) {
    const Edge& e = cand.edge(id);
    const CutTreatment t = treat_cut(state, cand, e);
    switch (t.kind) {
      case CutKind::Plain: {
        const double f = values.at({id, {PointKind::Center, 0}});
        sides[side_of(e.i)].cross(e.i, into_envelope(e, e.i, f));
        sides[side_of(e.j)].cross(e.j, into_envelope(e, e.j, f));
        break;
      }
      case CutKind::SplitCenter:
        to_split.emplace_back(id, values.at({id, {PointKind::Center, 0}}));
        break;
      case CutKind::HalfNear: {
        const NodeId v = t.actual_end;
        const NodeId m = v == e.i ? e.j : e.i;
        const double near = values.at({id, {PointKind::NearNode, v}});
        const double at_m = *e.known_flow;
        sides[side_of(v)].cross(v, into_envelope(e, v, near));
        sides[side_of(m)].cross(m, into_envelope(e, m, at_m));
        const SegmentCheck check = resolve_segment(state, id, v, near);
        const SegmentInfo info = segment_of(state, e);
        segment_envelopes.push_back(
            {Finding{Finding::Kind::Segment, 0, info.origin, info.from, info.to, id, check.loss},
             segment_balance(check.loss)});
        break;
      }
      case CutKind::BothEnds: {
        const double at_i = values.at({id, {PointKind::NearNode, e.i}});
        const double at_j = values.at({id, {PointKind::NearNode, e.j}});
        sides[side_of(e.i)].cross(e.i, into_envelope(e, e.i, at_i));
        sides[side_of(e.j)].cross(e.j, into_envelope(e, e.j, at_j));
        const SegmentCheck check = resolve_pipe_ends(at_i, at_j, state.tolerance);
        const SegmentInfo info = segment_of(state, e);
        segment_envelopes.push_back(
            {Finding{Finding::Kind::Segment, 0, info.origin, info.from, info.to, id, check.loss},
             segment_balance(check.loss)});
        break;
      }
    }
  }

  Network working = cand;
  if (!to_split.empty()) {
    std::vector<SplitRecord> records;
    working = split_edges(next, cand, to_split, records);
    for (const SplitRecord& r : records) {
      // Each side keeps the half touching it, ending at M where the center
      // reading enters.
      const int s_from = side_of(r.from_end);
      const int s_other = side_of(r.other_end);
      const Edge& h_from = working.edge(r.half_from);
      const Edge& h_other = working.edge(r.half_other);
      sides[s_from].members.push_back(r.artificial);
      sides[s_from].cross(r.artificial, into_envelope(h_other, r.artificial, r.known_other));
      sides[s_other].members.push_back(r.artificial);
      sides[s_other].cross(r.artificial, into_envelope(h_from, r.artificial, r.known_from));
    }
  }

  std::vector<EnvelopeBalance> balances;
  balances.push_back(side_balance(working, sides[0]));
  balances.push_back(side_balance(working, sides[1]));
  for (const SegmentEnvelope& s : segment_envelopes) balances.push_back(s.balance);
  const LeakMultiplicity multiplicity =
      state.config.multi_leak ? LeakMultiplicity::Multiple : LeakMultiplicity::Single;
  const bool parent_leaky = std::abs(parent.imbalance) > state.tolerance;
  const std::vector<LeakyPartition> leaky =
      find_leaky_partitions(balances, state.tolerance, multiplicity, parent_leaky);
  if (outcome) {
    outcome->envelopes.clear();
    for (std::size_t k = 0; k < balances.size(); ++k) {
      std::string label = k == 0 ? "S" : k == 1 ? "Sbar" : "segment:" + std::to_string(segment_envelopes[k - 2].finding.working_edge);
      outcome->envelopes.push_back({std::move(label), balances[k], false});
    }
    for (const LeakyPartition& lp : leaky) outcome->envelopes[lp.index].leaky = true;
  }

  std::vector<Branch> children;  // S first
  for (const LeakyPartition& lp : leaky) {
    if (lp.index >= 2) {
      Finding f = segment_envelopes[lp.index - 2].finding;
      f.imbalance = lp.verdict.imbalance;
      next.leaky_set.push_back(f);
      continue;
    }
    SideAccumulator& side = sides[lp.index];
    std::sort(side.members.begin(), side.members.end());
    Network child = prune_isolated_artificial(subgraph(working, side.members, side.injections));
    if (candidate_size(child, state.config.mode) <= state.config.delta) {
      auto found = findings_for(next, child, lp.verdict.imbalance);
      next.leaky_set.insert(next.leaky_set.end(), found.begin(), found.end());
    } else {
      children.push_back({std::move(child), lp.verdict.imbalance});
    }
  }
  // Depth-first with S explored before S-bar: push S last.
  for (auto it = children.rbegin(); it != children.rend(); ++it) next.branches.push_back(std::move(*it));

  for (const RequiredReading& r : expected.required) {
    next.query_log.push_back({r.edge, r.point, values.at({r.edge, r.point}), r.cost, state.stage, true});
    next.total_cost += r.cost;
  }
  for (const KnownReading& k : expected.known) next.query_log.push_back({k.edge, k.point, k.value, 0.0, state.stage, false});
  ++next.stage;
  ++next.version;
  return next;
}

CampaignState split_pipe(const CampaignState& state, EdgeId edge, double center_reading, EdgeId* first_half,
                         EdgeId* second_half, NodeId* artificial) {
  if (state.config.mode != LeakMode::Pipe) throw Error("split_pipe needs a pipe-mode campaign");
  const Network& cand = state.candidate();
  if (!cand.has_edge(edge)) throw Error("edge " + std::to_string(edge) + " is not in the candidate");
  if (state.segments.contains(edge)) throw Error("edge " + std::to_string(edge) + " is already split");
  CampaignState next = state;
  std::vector<SplitRecord> records;
  next.branches.back().candidate = split_edges(next, cand, {{edge, center_reading}}, records);
  ++next.version;
  if (first_half) *first_half = records.front().half_from;
  if (second_half) *second_half = records.front().half_other;
  if (artificial) *artificial = records.front().artificial;
  return next;
}

SegmentCheck resolve_pipe_ends(double reading_at_i, double reading_at_j, double tolerance) {
  SegmentCheck out;
  out.loss = reading_at_i - reading_at_j;
  out.verdict = std::abs(out.loss) > tolerance ? SegmentVerdict::LeakInSegment : SegmentVerdict::SegmentClear;
  return out;
}

SegmentCheck resolve_segment(const CampaignState& state, EdgeId half_edge, NodeId node, double near_node_reading) {
  if (!state.segments.contains(half_edge))
    throw Error("edge " + std::to_string(half_edge) + " is not a half-pipe");
  const Network& cand = state.candidate();
  const Edge& e = cand.edge(half_edge);
  if (node != e.i && node != e.j) throw Error("node " + std::to_string(node) + " is not an end of the half-pipe");
  if (cand.node(node).kind == NodeKind::Artificial)
    throw Error("near-node reading must be taken at the actual node end");
  if (!e.known_flow) throw Error("half-pipe has no known flow at its artificial end");
  const double at_i = node == e.i ? near_node_reading : *e.known_flow;
  const double at_j = node == e.i ? *e.known_flow : near_node_reading;
  return resolve_pipe_ends(at_i, at_j, state.tolerance);
}

OracleReadings::OracleReadings(const Network& base, LeakScenario scenario, bool valves_shut)
    : base_(&base), scenario_(std::move(scenario)) {
  const std::size_t n = base.n();
  std::vector<double> supply(n);
  for (std::size_t v = 0; v < n; ++v) supply[v] = base.nodes()[v].boundary_flow;

  std::map<EdgeId, std::vector<std::pair<double, double>>> pipe_leaks;  // fraction, magnitude
  std::set<NodeId> leaky_nodes;
  for (const ScenarioLeak& leak : scenario_.leaks) {
    if (!(leak.magnitude > 0.0)) throw InvalidNetwork("leak magnitudes must be positive");
    if (const auto* site = std::get_if<NodeSite>(&leak.site)) {
      if (!base.has_node(site->node)) throw InvalidNetwork("leak at unknown node " + std::to_string(site->node));
      if (!leaky_nodes.insert(site->node).second) throw InvalidNetwork("duplicate leak site");
      supply[base.index_of(site->node)] -= leak.magnitude;
    } else {
      const auto& p = std::get<PipeSite>(leak.site);
      if (!base.has_edge(p.edge)) throw InvalidNetwork("leak on unknown edge " + std::to_string(p.edge));
      if (!(p.fraction > 0.0 && p.fraction < 1.0)) throw InvalidNetwork("pipe leak fraction must lie in (0, 1)");
      pipe_leaks[p.edge].emplace_back(p.fraction, leak.magnitude);
    }
  }

  // Augmented graph: base nodes, then one node per pipe leak. Chain pieces
  // run along each pipe from its i end.
  struct Piece {
    std::size_t a, b;  // a -> b along the pipe
    EdgeId edge;
    std::size_t index;
  };
  std::vector<Piece> pieces;
  for (std::size_t k = 0; k < base.m(); ++k) {
    const Edge& e = base.edges()[k];
    Profile& prof = profile_[e.id];
    auto leaks_here = pipe_leaks[e.id];
    std::sort(leaks_here.begin(), leaks_here.end());
    for (std::size_t r = 1; r < leaks_here.size(); ++r)
      if (leaks_here[r].first == leaks_here[r - 1].first) throw InvalidNetwork("duplicate leak site");
    std::optional<double> fixed = e.known_flow;
    if (!fixed && valves_shut && e.has_valve) fixed = 0.0;
    const auto [ia, ib] = base.endpoints(k);
    if (fixed) {
      if (!leaks_here.empty()) throw InvalidNetwork("pipe leak on an edge with a fixed flow");
      prof.flows = {*fixed};
      supply[ia] -= *fixed;
      supply[ib] += *fixed;
      continue;
    }
    std::size_t prev = ia;
    for (std::size_t r = 0; r < leaks_here.size(); ++r) {
      prof.leak_fractions.push_back(leaks_here[r].first);
      const std::size_t p = supply.size();
      supply.push_back(-leaks_here[r].second);
      pieces.push_back({prev, p, e.id, r});
      prev = p;
    }
    pieces.push_back({prev, ib, e.id, leaks_here.size()});
    prof.flows.assign(leaks_here.size() + 1, 0.0);
  }

  const std::size_t total = supply.size();
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(total);  // neighbor, piece
  for (std::size_t q = 0; q < pieces.size(); ++q) {
    adj[pieces[q].a].emplace_back(pieces[q].b, q);
    adj[pieces[q].b].emplace_back(pieces[q].a, q);
  }
  const double tol = default_tolerance(base.total_production() + scenario_.total_magnitude());
  std::vector<char> seen(total, 0);
  std::vector<std::size_t> parent_piece(total, pieces.size());
  for (std::size_t root = 0; root < total; ++root) {
    if (seen[root]) continue;
    std::vector<std::size_t> order{root};
    seen[root] = 1;
    for (std::size_t h = 0; h < order.size(); ++h) {
      for (auto [u, q] : adj[order[h]]) {
        if (seen[u]) continue;
        seen[u] = 1;
        parent_piece[u] = q;
        order.push_back(u);
      }
    }
    std::vector<double> sub(total, 0.0);
    for (std::size_t v : order) sub[v] = supply[v];
    for (std::size_t h = order.size(); h-- > 1;) {
      const std::size_t v = order[h];
      const Piece& pc = pieces[parent_piece[v]];
      const std::size_t up = pc.a == v ? pc.b : pc.a;
      // The subtree's surplus leaves through the parent piece.
      profile_[pc.edge].flows[pc.index] = pc.a == v ? sub[v] : -sub[v];
      sub[up] += sub[v];
    }
    if (std::abs(sub[root]) > tol)
      throw InvalidNetwork("leak scenario is inconsistent with the network's boundary and known flows");
  }
}

double OracleReadings::flow_at(EdgeId edge, double fraction) const {
  const Profile& prof = profile_.at(edge);
  if (prof.flows.size() == 1) return prof.flows.front();
  // A meter exactly at a leak reads the flow on the leak's i-side.
  const auto idx = std::lower_bound(prof.leak_fractions.begin(), prof.leak_fractions.end(), fraction) -
                   prof.leak_fractions.begin();
  return prof.flows[static_cast<std::size_t>(idx)];
}

double OracleReadings::read(const CampaignState& state, const RequiredReading& request) {
  const Edge& e = state.candidate().edge(request.edge);
  const SegmentInfo info = segment_of(state, e);
  double fraction = 0.5 * (info.from + info.to);
  if (request.point.kind == PointKind::NearNode) {
    if (request.point.node == info.from_node) fraction = info.from;
    else if (request.point.node == e.i || request.point.node == e.j) fraction = info.to;
    else throw ReadingMismatch("measurement point is not an end of edge " + std::to_string(e.id));
  }
  const double along = flow_at(info.origin, fraction);
  return e.i == info.from_node ? along : -along;
}

std::size_t ProtocolResult::query_count() const {
  return static_cast<std::size_t>(
      std::count_if(query_log.begin(), query_log.end(), [](const FlowReading& r) { return r.measured; }));
}

ProtocolResult run_protocol(const Network& net, ReadingSource& source, const CampaignConfig& config,
                            const PartitionProvider& partitioner) {
  if (net.n() == 0 || connected_components(net).size() != 1) throw DisconnectedInput("network is not connected");
  CampaignState state = start_campaign(net, config);
  ProtocolResult result;
  while (!state.complete()) {
    QueryPlan plan = plan_stage(state, partitioner);
    std::vector<FlowReading> readings;
    readings.reserve(plan.required_readings.size());
    for (const RequiredReading& r : plan.required_readings)
      readings.push_back({r.edge, r.point, source.read(state, r), r.cost, state.stage, true});
    state = apply_readings(state, plan, readings);
    result.plans.push_back(std::move(plan));
  }
  result.leaky_set = std::move(state.leaky_set);
  result.total_cost = state.total_cost;
  result.query_log = std::move(state.query_log);
  result.stages = state.stage;
  return result;
}

Network with_leak_supply(const Network& balanced, const LeakScenario& scenario) {
  std::vector<Node> nodes(balanced.nodes().begin(), balanced.nodes().end());
  auto it = std::find_if(nodes.begin(), nodes.end(), [](const Node& v) { return v.kind == NodeKind::Source; });
  if (it == nodes.end()) throw InvalidNetwork("network has no source to feed the leak");
  it->boundary_flow += scenario.total_magnitude();
  return Network(std::move(nodes), std::vector<Edge>(balanced.edges().begin(), balanced.edges().end()));
}

}  // namespace leakloc
