#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "ransomrisk/core/types.hpp"
#include "ransomrisk/cti/response.hpp"

namespace ransomrisk::cti {

/// Conventional feature keys the synthesizer reads.
namespace feature_keys {
inline constexpr const char* adversary_name = "adversary_name";
inline constexpr const char* aliases = "aliases";
inline constexpr const char* sophistication = "sophistication";
inline constexpr const char* motive = "motive";
inline constexpr const char* intent = "intent";
inline constexpr const char* resource_level = "resource_level";
inline constexpr const char* ttps = "ttps";
inline constexpr const char* cves = "cves";
inline constexpr const char* sectors = "target_industry_sectors";
inline constexpr const char* countries = "target_countries";
}  // namespace feature_keys

enum class StixType { threat_actor, relationship, attack_pattern_ref, vulnerability_ref };

std::string_view to_string(StixType t);
StixType parse_stix_type(std::string_view s);

struct StixObject {
    std::string id;  // "<type>--<uuid>"
    StixType type = StixType::threat_actor;
    nlohmann::json properties = nlohmann::json::object();

    nlohmann::json to_json() const;
    static StixObject from_json(const nlohmann::json& j);
    bool operator==(const StixObject&) const = default;
};

/// Name-based UUID (SHA-256 of seed, type and key), stable across runs.
std::string deterministic_id(StixType type, std::string_view key, std::uint64_t seed);

/// One threat-actor carrying the SKRAM properties, targeted sectors and
/// countries, and rationales; plus an attack-pattern-ref and a "uses"
/// relationship per TTP, and a vulnerability-ref and an "exploits"
/// relationship per CVE. The adversary name comes from the
/// `adversary_name` feature when present, else `adversary_name`; throws
/// MissingCoreIdentity when neither is available.
std::vector<StixObject> synthesize_stix(const ValidatedFeatures& features, const std::string& adversary_name,
                                        std::uint64_t seed = 0);

/// Embedded document store persisted as a single JSON bundle. Writes are
/// serialized; reads may run concurrently.
class StixStore {
public:
    StixStore() = default;
    StixStore(const StixStore& other);
    StixStore& operator=(const StixStore& other);

    /// Idempotent by id. Re-inserting a threat-actor merges list properties
    /// and lets present scalars win. Throws DanglingReference when a
    /// relationship names an id neither stored nor in the batch; nothing is
    /// written in that case.
    std::vector<std::string> store_objects(const std::vector<StixObject>& objects);

    std::optional<StixObject> get(const std::string& id) const;
    std::size_t size() const;

    /// Canonical name of the actor answering to `name` (name or alias).
    std::optional<std::string> resolve_actor(std::string_view name) const;
    /// Rebuilds a profile; capability_count counts linked TTPs. Throws UnknownAdversary.
    AdversaryProfile query_adversary(std::string_view name) const;
    std::vector<AdversaryProfile> adversaries() const;

    nlohmann::json to_json() const;
    static StixStore from_json(const nlohmann::json& j);
    static StixStore load(const std::string& path);
    void save(const std::string& path) const;

private:
    const StixObject* find_actor(std::string_view name) const;
    AdversaryProfile assemble(const StixObject& actor) const;

    std::map<std::string, StixObject> objects_;
    mutable std::shared_mutex mutex_;
};

/// Recognises a STIX bundle document ({"type": "bundle", ...}).
bool is_stix_bundle(const nlohmann::json& j);

}  // namespace ransomrisk::cti
