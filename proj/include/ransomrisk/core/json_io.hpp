#pragma once

#include <json.hpp>

#include "ransomrisk/core/types.hpp"

namespace ransomrisk {

nlohmann::json to_json(const VictimProfile& v);
VictimProfile victim_from_json(const nlohmann::json& j);

nlohmann::json to_json(const AdversaryProfile& a);
AdversaryProfile adversary_from_json(const nlohmann::json& j);

nlohmann::json to_json(const AttackRecord& r);
AttackRecord attack_from_json(const nlohmann::json& j);

nlohmann::json to_json(const std::vector<AttackRecord>& records);
std::vector<AttackRecord> attacks_from_json(const nlohmann::json& j);

/// Reads a whole file; throws Error("FileNotFound") naming the path.
std::string read_file(const std::string& path);
nlohmann::json read_json_file(const std::string& path);
/// Writes atomically enough for a desk tool: truncate and write.
void write_file(const std::string& path, const std::string& content);
void write_json_file(const std::string& path, const nlohmann::json& j);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

}  // namespace ransomrisk
