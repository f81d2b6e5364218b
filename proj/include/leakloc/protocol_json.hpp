#pragma once

#include <json.hpp>

#include "leakloc/protocol.hpp"

namespace leakloc {

inline constexpr const char* kCampaignSchema = "leakloc.campaign/1";

nlohmann::json to_json(const CampaignConfig& config);
CampaignConfig config_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const MeasurementPoint& point);
MeasurementPoint point_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const FlowReading& reading);
/// Operator input: edge, point and value are required; the rest default.
FlowReading reading_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const Partition& partition);
Partition partition_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const QueryPlan& plan);
QueryPlan plan_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const Finding& finding);
Finding finding_from_json(const nlohmann::json& doc);

/// Versioned document; doubles round-trip exactly.
nlohmann::json to_json(const CampaignState& state);
CampaignState state_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const LeakScenario& scenario);
LeakScenario scenario_from_json(const nlohmann::json& doc);

}  // namespace leakloc
