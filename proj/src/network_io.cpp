#include "leakloc/network_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "leakloc/error.hpp"

namespace leakloc {

using nlohmann::json;

NetworkFormat network_format_from_string(std::string_view tag) {
  if (tag == "json" || tag == "custom-json") return NetworkFormat::Json;
  if (tag == "inp" || tag == "epanet-inp-subset") return NetworkFormat::Inp;
  throw ParseError("unknown network format '" + std::string(tag) + "'");
}

namespace {

template <typename T>
T field_or(const json& obj, const char* key, T fallback) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  return it->get<T>();
}

std::optional<double> optional_number(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  return it->get<double>();
}

}  // namespace

Network network_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("nodes") || !doc["nodes"].is_array())
    throw ParseError("network document needs a \"nodes\" array");
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  try {
    for (const json& jn : doc["nodes"]) {
      Node v;
      v.id = jn.at("id").get<NodeId>();
      v.kind = node_kind_from_string(field_or<std::string>(jn, "kind", "transmission"));
      v.boundary_flow = field_or<double>(jn, "boundary_flow", 0.0);
      v.label = field_or<std::string>(jn, "label", "");
      v.x = optional_number(jn, "x");
      v.y = optional_number(jn, "y");
      nodes.push_back(std::move(v));
    }
    if (doc.contains("edges")) {
      for (const json& je : doc.at("edges")) {
        Edge e;
        e.id = je.at("id").get<EdgeId>();
        e.i = je.at("i").get<NodeId>();
        e.j = je.at("j").get<NodeId>();
        e.query_cost = field_or<double>(je, "query_cost", 1.0);
        e.has_sensor = field_or<bool>(je, "has_sensor", false);
        e.has_valve = field_or<bool>(je, "has_valve", false);
        e.known_flow = optional_number(je, "known_flow");
        e.label = field_or<std::string>(je, "label", "");
        edges.push_back(std::move(e));
      }
    }
  } catch (const json::exception& ex) {
    throw ParseError(std::string("network document: ") + ex.what());
  }
  return Network(std::move(nodes), std::move(edges));
}

json network_to_json(const Network& net) {
  json nodes = json::array();
  for (const Node& v : net.nodes()) {
    json jn = {{"id", v.id}, {"kind", to_string(v.kind)}, {"boundary_flow", v.boundary_flow}};
    if (!v.label.empty()) jn["label"] = v.label;
    if (v.x) jn["x"] = *v.x;
    if (v.y) jn["y"] = *v.y;
    nodes.push_back(std::move(jn));
  }
  json edges = json::array();
  for (const Edge& e : net.edges()) {
    json je = {{"id", e.id},
               {"i", e.i},
               {"j", e.j},
               {"query_cost", e.query_cost},
               {"has_sensor", e.has_sensor},
               {"has_valve", e.has_valve},
               {"known_flow", e.known_flow ? json(*e.known_flow) : json(nullptr)}};
    if (!e.label.empty()) je["label"] = e.label;
    edges.push_back(std::move(je));
  }
  return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string> tokens(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

double parse_number(const std::string& tok, std::size_t line) {
  double value = 0.0;
  const auto* first = tok.data();
  const auto* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value))
    throw ParseError("expected a number, got '" + tok + "'", line);
  return value;
}

struct InpNode {
  std::string label;
  enum class Role { Junction, Reservoir, Tank } role;
  double demand = 0.0;
  bool demand_overridden = false;
  std::optional<double> x, y;
};

struct InpLink {
  std::string label;
  std::string from, to;
  bool valve = false;
};

}  // namespace

Network parse_inp(std::string_view content, std::vector<std::string>* warnings) {
  std::vector<InpNode> inp_nodes;
  std::unordered_map<std::string, std::size_t> by_label;
  std::vector<InpLink> links;
  std::vector<std::pair<std::vector<std::string>, std::size_t>> demand_rows, coord_rows;
  std::unordered_map<std::string, std::size_t> link_labels;

  auto add_node = [&](const std::string& label, InpNode::Role role, double demand, std::size_t line) {
    if (by_label.contains(label)) throw ParseError("duplicate node id '" + label + "'", line);
    by_label.emplace(label, inp_nodes.size());
    inp_nodes.push_back({label, role, demand, false, std::nullopt, std::nullopt});
  };

  std::string section;
  std::size_t line_no = 0;
  std::istringstream in{std::string(content)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto semi = line.find(';'); semi != std::string_view::npos) line = line.substr(0, semi);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("unterminated section header", line_no);
      section = std::string(line.substr(1, line.size() - 2));
      std::transform(section.begin(), section.end(), section.begin(),
                     [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
      static const char* known[] = {"JUNCTIONS", "RESERVOIRS", "TANKS", "PIPES", "PUMPS",
                                    "VALVES", "DEMANDS", "COORDINATES", "END"};
      if (std::find(std::begin(known), std::end(known), section) == std::end(known) && warnings)
        warnings->push_back("line " + std::to_string(line_no) + ": skipping section [" + section + "]");
      continue;
    }
    const auto tok = tokens(line);
    if (section == "JUNCTIONS") {
      if (tok.size() < 2) throw ParseError("junction needs id and elevation", line_no);
      const double demand = tok.size() >= 3 ? parse_number(tok[2], line_no) : 0.0;
      add_node(tok[0], InpNode::Role::Junction, demand, line_no);
    } else if (section == "RESERVOIRS") {
      if (tok.empty()) throw ParseError("reservoir needs an id", line_no);
      add_node(tok[0], InpNode::Role::Reservoir, 0.0, line_no);
    } else if (section == "TANKS") {
      if (tok.empty()) throw ParseError("tank needs an id", line_no);
      add_node(tok[0], InpNode::Role::Tank, 0.0, line_no);
    } else if (section == "PIPES" || section == "PUMPS" || section == "VALVES") {
      if (tok.size() < 3) throw ParseError("link needs id and two end nodes", line_no);
      if (!link_labels.emplace(tok[0], line_no).second)
        throw ParseError("duplicate link id '" + tok[0] + "'", line_no);
      // Endpoints are resolved once every node section has been read.
      links.push_back({tok[0], tok[1], tok[2], section == "VALVES"});
    } else if (section == "DEMANDS") {
      if (tok.size() < 2) throw ParseError("demand row needs junction and value", line_no);
      demand_rows.emplace_back(tok, line_no);
    } else if (section == "COORDINATES") {
      if (tok.size() < 3) throw ParseError("coordinate row needs id, x, y", line_no);
      coord_rows.emplace_back(tok, line_no);
    }
  }

  for (const auto& [tok, line] : demand_rows) {
    auto it = by_label.find(tok[0]);
    if (it == by_label.end()) throw ParseError("demand for unknown junction '" + tok[0] + "'", line);
    InpNode& v = inp_nodes[it->second];
    const double d = parse_number(tok[1], line);
    if (!v.demand_overridden) {
      v.demand = 0.0;
      v.demand_overridden = true;
    }
    v.demand += d;
  }
  for (const auto& [tok, line] : coord_rows) {
    auto it = by_label.find(tok[0]);
    if (it == by_label.end()) continue;
    inp_nodes[it->second].x = parse_number(tok[1], line);
    inp_nodes[it->second].y = parse_number(tok[2], line);
  }

  double total_demand = 0.0;
  std::size_t reservoirs = 0, tanks = 0;
  for (const InpNode& v : inp_nodes) {
    if (v.role == InpNode::Role::Junction) total_demand += v.demand;
    if (v.role == InpNode::Role::Reservoir) ++reservoirs;
    if (v.role == InpNode::Role::Tank) ++tanks;
  }
  // Fixed-head nodes absorb the net demand; reservoirs take precedence over tanks.
  const InpNode::Role feeder = reservoirs > 0 ? InpNode::Role::Reservoir : InpNode::Role::Tank;
  const std::size_t feeders = reservoirs > 0 ? reservoirs : tanks;

  std::vector<Node> nodes;
  nodes.reserve(inp_nodes.size());
  for (std::size_t k = 0; k < inp_nodes.size(); ++k) {
    const InpNode& src = inp_nodes[k];
    Node v;
    v.id = static_cast<NodeId>(k + 1);
    v.label = src.label;
    v.x = src.x;
    v.y = src.y;
    if (src.role == InpNode::Role::Junction) {
      v.boundary_flow = -src.demand;
      v.kind = src.demand > 0.0   ? NodeKind::Demand
               : src.demand < 0.0 ? NodeKind::Source
                                  : NodeKind::Transmission;
    } else {
      v.kind = NodeKind::Source;
      v.boundary_flow = (src.role == feeder && feeders > 0) ? total_demand / static_cast<double>(feeders) : 0.0;
    }
    nodes.push_back(std::move(v));
  }

  std::vector<Edge> edges;
  edges.reserve(links.size());
  for (std::size_t k = 0; k < links.size(); ++k) {
    const InpLink& l = links[k];
    const std::size_t line = link_labels.at(l.label);
    auto a = by_label.find(l.from);
    auto b = by_label.find(l.to);
    if (a == by_label.end() || b == by_label.end())
      throw ParseError("link '" + l.label + "': dangling endpoint '" + (a == by_label.end() ? l.from : l.to) + "'",
                       line);
    Edge e;
    e.id = static_cast<EdgeId>(k + 1);
    e.i = static_cast<NodeId>(a->second + 1);
    e.j = static_cast<NodeId>(b->second + 1);
    e.has_valve = l.valve;
    e.label = l.label;
    if (e.i == e.j) throw ParseError("link '" + l.label + "' is a self-loop", line);
    edges.push_back(std::move(e));
  }
  return Network(std::move(nodes), std::move(edges));
}

Network load_network(std::string_view content, NetworkFormat format, std::vector<std::string>* warnings) {
  Network net;
  if (format == NetworkFormat::Json) {
    json doc;
    try {
      doc = json::parse(content);
    } catch (const json::parse_error& ex) {
      // nlohmann reports a byte offset; translate to a line number.
      const std::size_t offset = std::min<std::size_t>(ex.byte, content.size());
      const std::size_t line = 1 + static_cast<std::size_t>(std::count(content.begin(), content.begin() + offset, '\n'));
      throw ParseError(std::string("malformed JSON: ") + ex.what(), line);
    }
    net = network_from_json(doc);
  } else {
    net = parse_inp(content, warnings);
  }
  require_kind_flow_consistency(net);
  return net;
}

Network load_network_file(const std::string& path, NetworkFormat format, std::vector<std::string>* warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open network file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_network(buf.str(), format, warnings);
}

}  // namespace leakloc
