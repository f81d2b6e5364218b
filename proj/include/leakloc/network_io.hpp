#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "leakloc/network.hpp"

namespace leakloc {

enum class NetworkFormat { Json, Inp };

NetworkFormat network_format_from_string(std::string_view tag);

/// Parses a network document. INP ingestion keeps topology, base demands and
/// coordinates; unknown sections are skipped and reported through `warnings`.
Network load_network(std::string_view content, NetworkFormat format,
                     std::vector<std::string>* warnings = nullptr);
Network load_network_file(const std::string& path, NetworkFormat format,
                          std::vector<std::string>* warnings = nullptr);

Network network_from_json(const nlohmann::json& doc);
nlohmann::json network_to_json(const Network& net);

Network parse_inp(std::string_view content, std::vector<std::string>* warnings = nullptr);

}  // namespace leakloc
