#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "leakloc/protocol.hpp"

namespace httplib {
class Server;
}

namespace leakloc {

inline constexpr const char* kDocumentSchema = "leakloc.campaign-document/1";

/// Persisted campaign: the creation inputs, every accepted reading batch,
/// and the resulting state with its pending plan.
struct CampaignDocument {
  std::string id;
  std::string created;
  std::string updated;
  nlohmann::json network;  // as uploaded
  CampaignConfig config;
  bool force = false;
  CampaignState state;
  std::optional<QueryPlan> plan;  // absent once complete
  std::vector<std::vector<FlowReading>> events;

  std::uint64_t version() const { return state.version; }
};

nlohmann::json to_json(const CampaignDocument& doc);
CampaignDocument document_from_json(const nlohmann::json& doc);

struct SubmitResult {
  CampaignDocument document;
  StageOutcome outcome;
};

/// One JSON file per campaign, replaced by write-then-rename. Writers are
/// serialized per store only around the version check and the rename; the
/// protocol step itself runs outside any lock.
class CampaignStore {
 public:
  explicit CampaignStore(std::filesystem::path directory);

  /// Throws ParseError / InvalidNetwork for a bad network and
  /// NoLeakDetected when it balances and `force` is off.
  CampaignDocument create(const nlohmann::json& network, const CampaignConfig& config, bool force);
  CampaignDocument load(const std::string& id) const;
  /// Throws VersionConflict when `expected_version` is stale; the stored
  /// document is untouched on any error.
  SubmitResult submit(const std::string& id, std::uint64_t expected_version, const std::vector<FlowReading>& readings);
  std::vector<std::string> list() const;

  const std::filesystem::path& directory() const { return directory_; }

 private:
  std::filesystem::path path_for(const std::string& id) const;
  void write(const CampaignDocument& doc) const;

  std::filesystem::path directory_;
  std::mutex commit_mutex_;
};

/// Rebuilds the state from the creation inputs and the event log.
CampaignState replay(const CampaignDocument& doc);

/// Routes: POST /campaigns, GET /campaigns/{id}, GET /campaigns/{id}/plan,
/// POST /campaigns/{id}/readings, GET /campaigns/{id}/state.
void register_routes(httplib::Server& server, CampaignStore& store);

/// Blocks serving until the process is stopped.
void serve(const std::string& address, int port, const std::filesystem::path& data_dir);

}  // namespace leakloc
