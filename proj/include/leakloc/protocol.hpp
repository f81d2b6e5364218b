#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "leakloc/balance.hpp"
#include "leakloc/bisection.hpp"
#include "leakloc/ilp_partitioner.hpp"
#include "leakloc/network.hpp"
#include "leakloc/spectral.hpp"

namespace leakloc {

enum class PartitionMethod { IlpGoalProgramming, IlpLexicographic, Spectral };
enum class LeakMode { Node, Pipe };
/// Pipe mode only. CenterSplit measures a pipe once near its middle and
/// inserts an artificial node there; DoubleEnded measures both ends at once.
enum class PipeStrategy { CenterSplit, DoubleEnded };

std::string_view to_string(PartitionMethod method);
PartitionMethod partition_method_from_string(std::string_view text);
std::string_view to_string(LeakMode mode);
LeakMode leak_mode_from_string(std::string_view text);
std::string_view to_string(PipeStrategy strategy);
PipeStrategy pipe_strategy_from_string(std::string_view text);

struct CampaignConfig {
  PartitionMethod method = PartitionMethod::IlpGoalProgramming;
  double gamma = 0.1;
  std::size_t delta = 1;
  LeakMode mode = LeakMode::Node;
  PipeStrategy pipe_strategy = PipeStrategy::CenterSplit;
  bool multi_leak = false;
  /// Edges whose flow is already known get zero weight when partitioning.
  bool sensor_integration = true;
  /// Valves may be shut, giving a known zero flow for free.
  bool disruptive_valves = false;
  /// Balance tolerance; nonpositive picks the default from total production.
  double tolerance = 0.0;
  std::size_t ilp_node_budget = IlpOptions{}.node_budget;
  WeightRule spectral_rule = WeightRule::Literal;
};

enum class PointKind { Center, NearNode };

struct MeasurementPoint {
  PointKind kind = PointKind::Center;
  NodeId node = 0;  // NearNode only

  bool operator==(const MeasurementPoint&) const = default;
  auto operator<=>(const MeasurementPoint&) const = default;
};

struct FlowReading {
  EdgeId edge = 0;
  MeasurementPoint point;
  double value = 0.0;  // signed by the edge's i -> j convention
  double cost_charged = 0.0;
  std::size_t stage = 0;
  /// False for values taken from sensors, shut valves or earlier readings.
  bool measured = true;

  bool operator==(const FlowReading&) const = default;
};

struct RequiredReading {
  EdgeId edge = 0;
  MeasurementPoint point;
  double cost = 0.0;
  bool operator==(const RequiredReading&) const = default;
};

/// A reading the plan can fill without a field visit.
struct KnownReading {
  EdgeId edge = 0;
  MeasurementPoint point;
  double value = 0.0;
  bool operator==(const KnownReading&) const = default;
};

struct QueryPlan {
  std::size_t stage = 0;
  Partition partition;
  bool component_split = false;  // candidate was disconnected; empty cut
  std::vector<RequiredReading> required_readings;
  std::vector<KnownReading> known_readings;
  double planned_cost = 0.0;
  bool operator==(const QueryPlan&) const = default;
};

struct NodeSite {
  NodeId node = 0;
  bool operator==(const NodeSite&) const = default;
};
struct PipeSite {
  EdgeId edge = 0;
  double fraction = 0.5;  // measured from the edge's i endpoint
  bool operator==(const PipeSite&) const = default;
};
using LeakLocation = std::variant<NodeSite, PipeSite>;

struct ScenarioLeak {
  LeakLocation site;
  double magnitude = 1.0;
};

struct LeakScenario {
  std::vector<ScenarioLeak> leaks;
  double total_magnitude() const;
};

/// A resolved leak site: a node or a stretch [from, to] of an original pipe.
struct Finding {
  enum class Kind { Node, Segment };
  Kind kind = Kind::Node;
  NodeId node = 0;
  EdgeId pipe = 0;          // original edge id (Segment)
  double from = 0.0, to = 1.0;
  EdgeId working_edge = 0;  // edge id in the campaign's split representation
  double imbalance = 0.0;

  bool contains(const LeakLocation& site) const;
  bool operator==(const Finding&) const = default;
};

/// Where a working edge lies on an original pipe. Fractions run from the
/// original i endpoint; `from_node` is the endpoint sitting at `from`.
struct SegmentInfo {
  EdgeId origin = 0;
  double from = 0.0, to = 1.0;
  NodeId from_node = 0;
  bool operator==(const SegmentInfo&) const = default;
};

struct Branch {
  Network candidate;
  double imbalance = 0.0;
  bool operator==(const Branch&) const = default;
};

/// Single-writer state of one campaign. Branches form a depth-first stack;
/// the back is the active candidate.
struct CampaignState {
  CampaignConfig config;
  Network base;
  double tolerance = 0.0;
  std::map<EdgeId, SegmentInfo> segments;  // half-pipes created by splits
  NodeId next_node_id = 1;
  EdgeId next_edge_id = 1;
  std::vector<Branch> branches;
  std::vector<Finding> leaky_set;
  std::vector<FlowReading> query_log;
  double total_cost = 0.0;
  std::size_t stage = 0;
  std::uint64_t version = 1;

  bool complete() const { return branches.empty(); }
  const Network& candidate() const;
};

/// Leak candidates in a network: actual nodes in node mode; actual nodes
/// plus pipes and half-pipe segments in pipe mode.
std::size_t candidate_size(const Network& net, LeakMode mode);

/// Fresh campaign over `net`. Throws NoLeakDetected when the network
/// balances and `force` is off.
CampaignState start_campaign(const Network& net, const CampaignConfig& config, bool force = false);

using PartitionProvider = std::function<Partition(const BisectionProblem&, PartitionMethod, const CampaignConfig&)>;

/// Runs the configured partitioner.
Partition run_partitioner(const BisectionProblem& problem, PartitionMethod method, const CampaignConfig& config);

/// Next split of the active candidate. Throws CampaignComplete when nothing
/// is left above delta.
QueryPlan plan_stage(const CampaignState& state, const PartitionProvider& partitioner = {});
QueryPlan plan_stage(const CampaignState& state, PartitionMethod method, double gamma);

/// Balances evaluated during one stage: S, S-bar, then any cut segment.
struct StageOutcome {
  struct Envelope {
    std::string label;  // "S", "Sbar" or "segment:<edge>"
    EnvelopeBalance balance;
    bool leaky = false;
  };
  std::vector<Envelope> envelopes;
};

/// Consumes exactly the plan's required readings and advances one stage.
/// Throws ReadingMismatch for missing, duplicate or extra readings and
/// NoLeakDetected / MultipleLeaksInSingleLeakMode for inconsistent balances;
/// the input state is never modified.
CampaignState apply_readings(const CampaignState& state, const QueryPlan& plan, std::span<const FlowReading> readings,
                             StageOutcome* outcome = nullptr);

/// Replaces edge (i, j) of the active candidate by (i, M) and (M, j) with a
/// new artificial node M. The center reading becomes the known flow at the
/// M end of both halves.
CampaignState split_pipe(const CampaignState& state, EdgeId edge, double center_reading, EdgeId* first_half = nullptr,
                         EdgeId* second_half = nullptr, NodeId* artificial = nullptr);

enum class SegmentVerdict { LeakInSegment, SegmentClear };

struct SegmentCheck {
  SegmentVerdict verdict = SegmentVerdict::SegmentClear;
  double loss = 0.0;  // flow lost inside the segment
};

/// Compares the near-node reading on a half-pipe with its known M-end flow.
/// `node` must be the half-pipe's actual (non-artificial) endpoint.
SegmentCheck resolve_segment(const CampaignState& state, EdgeId half_edge, NodeId node, double near_node_reading);

/// Two readings near both ends of a pipe, each signed by the edge's own
/// convention.
SegmentCheck resolve_pipe_ends(double reading_at_i, double reading_at_j, double tolerance);

/// Source of flow readings for a plan.
class ReadingSource {
 public:
  virtual ~ReadingSource() = default;
  virtual double read(const CampaignState& state, const RequiredReading& request) = 0;
};

/// Noiseless readings synthesized from ground truth: leaks act as extra
/// sinks and flows are carried on a spanning tree. Any conservative flow
/// assignment gives the same balance verdicts; the tree keeps values
/// deterministic. A meter placed exactly at a pipe leak reads the flow on
/// the leak's i-side.
class OracleReadings : public ReadingSource {
 public:
  /// Throws InvalidNetwork when the scenario cannot be a steady state of
  /// `base` (boundary flows must exceed consumption by the total leak).
  OracleReadings(const Network& base, LeakScenario scenario, bool valves_shut = false);

  double read(const CampaignState& state, const RequiredReading& request) override;
  /// Flow on an original edge at a fraction along it, in its convention.
  double flow_at(EdgeId edge, double fraction) const;

 private:
  const Network* base_;
  LeakScenario scenario_;
  struct Profile {
    std::vector<double> leak_fractions;  // sorted
    std::vector<double> flows;           // one more entry than leak_fractions
  };
  std::map<EdgeId, Profile> profile_;
};

class CallbackReadings : public ReadingSource {
 public:
  using Callback = std::function<double(const CampaignState&, const RequiredReading&)>;
  explicit CallbackReadings(Callback callback) : callback_(std::move(callback)) {}
  double read(const CampaignState& state, const RequiredReading& request) override { return callback_(state, request); }

 private:
  Callback callback_;
};

struct ProtocolResult {
  std::vector<Finding> leaky_set;
  double total_cost = 0.0;
  std::vector<FlowReading> query_log;
  std::vector<QueryPlan> plans;
  std::size_t stages = 0;
  std::size_t query_count() const;
};

/// Full protocol loop: plan, read, apply until every branch is at or below
/// delta.
ProtocolResult run_protocol(const Network& net, ReadingSource& source, const CampaignConfig& config,
                            const PartitionProvider& partitioner = {});

/// Raises the first source's production by the scenario's total leak so the
/// network is a consistent steady state with those leaks.
Network with_leak_supply(const Network& balanced, const LeakScenario& scenario);

}  // namespace leakloc
