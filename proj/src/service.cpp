#include "leakloc/service.hpp"

#include <atomic>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include <httplib.h>

#include "leakloc/error.hpp"
#include "leakloc/network_io.hpp"
#include "leakloc/protocol_json.hpp"

namespace leakloc {

using nlohmann::json;

namespace {

std::string now_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

std::string fresh_id() {
  static std::atomic<std::uint64_t> counter{0};
  static const std::uint64_t salt = std::random_device{}() ^ static_cast<std::uint64_t>(
                                                                  std::chrono::steady_clock::now().time_since_epoch().count());
  std::mt19937_64 mix(salt + counter.fetch_add(1));
  std::ostringstream out;
  out << 'c' << std::hex << std::setw(16) << std::setfill('0') << mix();
  return out.str();
}

bool valid_id(const std::string& id) {
  if (id.empty() || id.size() > 64) return false;
  for (char c : id)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') return false;
  return true;
}

std::optional<QueryPlan> next_plan(const CampaignState& state) {
  if (state.complete()) return std::nullopt;
  return plan_stage(state);
}

}  // namespace

json to_json(const CampaignDocument& d) {
  json events = json::array();
  for (const auto& batch : d.events) {
    json readings = json::array();
    for (const FlowReading& r : batch) readings.push_back(to_json(r));
    events.push_back({{"type", "readings"}, {"readings", std::move(readings)}});
  }
  return {{"schema", kDocumentSchema},
          {"id", d.id},
          {"created", d.created},
          {"updated", d.updated},
          {"version", d.version()},
          {"network", d.network},
          {"config", to_json(d.config)},
          {"force", d.force},
          {"state", to_json(d.state)},
          {"plan", d.plan ? to_json(*d.plan) : json(nullptr)},
          {"events", std::move(events)}};
}

CampaignDocument document_from_json(const json& j) {
  try {
    if (j.value("schema", "") != kDocumentSchema) throw ParseError("unsupported campaign document schema");
    CampaignDocument d;
    d.id = j.at("id").get<std::string>();
    d.created = j.at("created").get<std::string>();
    d.updated = j.at("updated").get<std::string>();
    d.network = j.at("network");
    d.config = config_from_json(j.at("config"));
    d.force = j.at("force").get<bool>();
    d.state = state_from_json(j.at("state"));
    if (!j.at("plan").is_null()) d.plan = plan_from_json(j.at("plan"));
    for (const json& e : j.at("events")) {
      std::vector<FlowReading> batch;
      for (const json& r : e.at("readings")) batch.push_back(reading_from_json(r));
      d.events.push_back(std::move(batch));
    }
    return d;
  } catch (const json::exception& ex) {
    throw ParseError(std::string("campaign document: ") + ex.what());
  }
}

CampaignState replay(const CampaignDocument& doc) {
  Network net = network_from_json(doc.network);
  require_kind_flow_consistency(net);
  CampaignState state = start_campaign(net, doc.config, doc.force);
  for (const auto& batch : doc.events) {
    const QueryPlan plan = plan_stage(state);
    state = apply_readings(state, plan, batch);
  }
  return state;
}

CampaignStore::CampaignStore(std::filesystem::path directory) : directory_(std::move(directory)) {
  std::filesystem::create_directories(directory_);
}

std::filesystem::path CampaignStore::path_for(const std::string& id) const {
  if (!valid_id(id)) throw NotFound("unknown campaign '" + id + "'");
  return directory_ / (id + ".json");
}

void CampaignStore::write(const CampaignDocument& doc) const {
  const auto target = path_for(doc.id);
  auto tmp = target;
  tmp += ".tmp" + fresh_id();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << to_json(doc).dump(2) << '\n';
    out.flush();
    if (!out) throw Error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

CampaignDocument CampaignStore::load(const std::string& id) const {
  const auto path = path_for(id);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFound("unknown campaign '" + id + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::parse_error& ex) {
    throw Error("corrupt campaign document '" + id + "': " + ex.what());
  }
  return document_from_json(j);
}

CampaignDocument CampaignStore::create(const json& network, const CampaignConfig& config, bool force) {
  Network net = network_from_json(network);
  require_kind_flow_consistency(net);
  CampaignDocument doc;
  doc.id = fresh_id();
  doc.created = doc.updated = now_utc();
  doc.network = network;
  doc.config = config;
  doc.force = force;
  doc.state = start_campaign(net, config, force);
  doc.plan = next_plan(doc.state);
  std::lock_guard lock(commit_mutex_);
  write(doc);
  return doc;
}

SubmitResult CampaignStore::submit(const std::string& id, std::uint64_t expected_version,
                                   const std::vector<FlowReading>& readings) {
  CampaignDocument doc = load(id);
  if (doc.version() != expected_version)
    throw VersionConflict("version conflict: stored " + std::to_string(doc.version()) + ", expected " +
                          std::to_string(expected_version));
  if (!doc.plan) throw CampaignComplete("campaign complete");
  SubmitResult result;
  CampaignState next = apply_readings(doc.state, *doc.plan, readings, &result.outcome);
  doc.events.emplace_back(readings.begin(), readings.end());
  doc.state = std::move(next);
  doc.plan = next_plan(doc.state);
  doc.updated = now_utc();

  std::lock_guard lock(commit_mutex_);
  // Another writer may have committed while this one computed.
  if (load(id).version() != expected_version)
    throw VersionConflict("version conflict: campaign '" + id + "' changed concurrently");
  write(doc);
  result.document = std::move(doc);
  return result;
}

std::vector<std::string> CampaignStore::list() const {
  std::vector<std::string> ids;
  for (const auto& entry : std::filesystem::directory_iterator(directory_)) {
    if (entry.path().extension() == ".json") ids.push_back(entry.path().stem().string());
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

namespace {

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& status_word, const std::string& message,
                 std::optional<std::uint64_t> version = std::nullopt) {
  json body = {{"status", status_word}, {"error", message}};
  if (version) body["version"] = *version;
  reply(res, status, body);
}

json candidate_view(const CampaignState& state) {
  json nodes = json::array();
  json edges = json::array();
  if (!state.complete()) {
    for (NodeId id : state.candidate().node_ids()) nodes.push_back(id);
    for (const Edge& e : state.candidate().edges()) edges.push_back(e.id);
  }
  return {{"nodes", nodes},
          {"edges", edges},
          {"size", state.complete() ? 0 : candidate_size(state.candidate(), state.config.mode)}};
}

json leaky_set_json(const CampaignState& state) {
  json out = json::array();
  for (const Finding& f : state.leaky_set) out.push_back(to_json(f));
  return out;
}

template <typename F>
void guarded(httplib::Response& res, F&& handler) {
  try {
    handler();
  } catch (const NotFound& e) {
    reply_error(res, 404, "not_found", e.what());
  } catch (const VersionConflict& e) {
    reply_error(res, 409, "conflict", e.what());
  } catch (const CampaignComplete& e) {
    reply_error(res, 409, "complete", e.what());
  } catch (const NoLeakDetected& e) {
    reply_error(res, 422, "inconsistent", e.what());
  } catch (const MultipleLeaksInSingleLeakMode& e) {
    reply_error(res, 422, "inconsistent", e.what());
  } catch (const ReadingMismatch& e) {
    reply_error(res, 400, "reading_mismatch", e.what());
  } catch (const ParseError& e) {
    reply_error(res, 400, "invalid", e.what());
  } catch (const InvalidNetwork& e) {
    reply_error(res, 400, "invalid", e.what());
  } catch (const DisconnectedInput& e) {
    reply_error(res, 400, "invalid", e.what());
  } catch (const json::exception& e) {
    reply_error(res, 400, "invalid", e.what());
  } catch (const std::exception& e) {
    reply_error(res, 500, "error", e.what());
  }
}

}  // namespace

void register_routes(httplib::Server& server, CampaignStore& store) {
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  server.Post("/campaigns", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      json body;
      try {
        body = json::parse(req.body);
      } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
      }
      if (!body.is_object() || !body.contains("network")) throw ParseError("request needs a \"network\" document");
      const CampaignConfig config = config_from_json(body);
      const bool force = body.value("force", false);
      const CampaignDocument doc = store.create(body.at("network"), config, force);
      reply(res, 201,
            {{"id", doc.id},
             {"version", doc.version()},
             {"initial_imbalance", doc.state.base.net_boundary_flow()},
             {"complete", doc.state.complete()},
             {"candidate", candidate_view(doc.state)},
             {"leaky_set", leaky_set_json(doc.state)}});
    });
  });

  server.Get(R"(/campaigns/([^/]+))", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { reply(res, 200, to_json(store.load(req.matches[1]))); });
  });

  server.Get(R"(/campaigns/([^/]+)/plan)", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const CampaignDocument doc = store.load(req.matches[1]);
      if (!doc.plan) {
        reply(res, 200,
              {{"status", "complete"},
               {"version", doc.version()},
               {"leaky_set", leaky_set_json(doc.state)},
               {"total_cost", doc.state.total_cost}});
        return;
      }
      reply(res, 200, {{"status", "active"}, {"version", doc.version()}, {"plan", to_json(*doc.plan)}});
    });
  });

  server.Post(R"(/campaigns/([^/]+)/readings)", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      json body;
      try {
        body = json::parse(req.body);
      } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
      }
      const auto expected = body.at("expected_version").get<std::uint64_t>();
      std::vector<FlowReading> readings;
      for (const json& r : body.at("readings")) readings.push_back(reading_from_json(r));
      const std::string id = req.matches[1];
      SubmitResult result;
      try {
        result = store.submit(id, expected, readings);
      } catch (const NoLeakDetected& e) {
        reply_error(res, 422, "inconsistent", std::string(e.what()) + "; re-measure the plan's readings",
                    store.load(id).version());
        return;
      } catch (const MultipleLeaksInSingleLeakMode& e) {
        reply_error(res, 422, "inconsistent", e.what(), store.load(id).version());
        return;
      } catch (const VersionConflict& e) {
        reply_error(res, 409, "conflict", e.what(), store.load(id).version());
        return;
      }
      const CampaignState& st = result.document.state;
      json verdicts = json::array();
      for (const auto& env : result.outcome.envelopes)
        verdicts.push_back({{"envelope", env.label}, {"imbalance", env.balance.imbalance}, {"leaky", env.leaky}});
      reply(res, 200,
            {{"status", st.complete() ? "complete" : "active"},
             {"version", result.document.version()},
             {"stage", st.stage},
             {"total_cost", st.total_cost},
             {"candidate", candidate_view(st)},
             {"verdicts", std::move(verdicts)},
             {"leaky_set", leaky_set_json(st)}});
    });
  });

  server.Get(R"(/campaigns/([^/]+)/state)", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const CampaignDocument doc = store.load(req.matches[1]);
      reply(res, 200,
            {{"id", doc.id},
             {"version", doc.version()},
             {"created", doc.created},
             {"updated", doc.updated},
             {"status", doc.state.complete() ? "complete" : "active"},
             {"candidate", candidate_view(doc.state)},
             {"state", to_json(doc.state)}});
    });
  });

  server.Get("/campaigns", [&store](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] { reply(res, 200, {{"campaigns", store.list()}}); });
  });
}

void serve(const std::string& address, int port, const std::filesystem::path& data_dir) {
  CampaignStore store(data_dir);
  httplib::Server server;
  register_routes(server, store);
  if (!server.listen(address, port)) throw Error("cannot listen on " + address + ":" + std::to_string(port));
}

}  // namespace leakloc
