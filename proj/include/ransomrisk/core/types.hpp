#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ransomrisk/core/date.hpp"

namespace ransomrisk {

// ---------------------------------------------------------------------------
// Validated identifiers. Instances only come out of the validate_* functions,
// so holding one means the value is in its vocabulary or matches its pattern.
// ---------------------------------------------------------------------------

class CountryCode {
public:
    const std::string& str() const { return code_; }
    auto operator<=>(const CountryCode&) const = default;

private:
    explicit CountryCode(std::string code) : code_(std::move(code)) {}
    friend CountryCode validate_country(std::string_view);
    std::string code_;
};

class IndustrySector {
public:
    const std::string& str() const { return value_; }
    auto operator<=>(const IndustrySector&) const = default;

private:
    explicit IndustrySector(std::string value) : value_(std::move(value)) {}
    friend IndustrySector validate_sector(std::string_view);
    std::string value_;
};

class AttackTechniqueId {
public:
    const std::string& str() const { return id_; }
    auto operator<=>(const AttackTechniqueId&) const = default;

private:
    explicit AttackTechniqueId(std::string id) : id_(std::move(id)) {}
    friend AttackTechniqueId validate_technique(std::string_view);
    std::string id_;
};

class CveId {
public:
    const std::string& str() const { return id_; }
    auto operator<=>(const CveId&) const = default;

private:
    explicit CveId(std::string id) : id_(std::move(id)) {}
    friend CveId validate_cve(std::string_view);
    std::string id_;
};

/// Throws Error("UnknownCountry") unless the uppercased code is ISO 3166-1 alpha-2.
CountryCode validate_country(std::string_view code);
/// Throws Error("UnknownSector") unless the normalized value is a STIX 2.1 sector.
IndustrySector validate_sector(std::string_view value);
/// Throws Error("MalformedTechniqueId"); also "UnknownTechniqueId" when a
/// catalog snapshot is installed and the id is absent from it.
AttackTechniqueId validate_technique(std::string_view id);
/// Throws Error("MalformedCveId"), or "UnknownCveId" against an installed snapshot.
CveId validate_cve(std::string_view id);

bool is_technique_pattern(std::string_view id);
bool is_cve_pattern(std::string_view id);

/// Optional existence snapshots for ATT&CK technique and CVE ids. When
/// unset, only the syntactic pattern is enforced.
void install_technique_snapshot(std::optional<std::set<std::string>> ids);
void install_cve_snapshot(std::optional<std::set<std::string>> ids);
std::set<std::string> load_id_snapshot(const std::string& path);

// ---------------------------------------------------------------------------
// Closed enumerations. Names are the hyphenated vocabulary tokens.
// ---------------------------------------------------------------------------

enum class OrgType { for_profit, non_profit, school, hospital, government, other };
enum class Sophistication { none, minimal, intermediate, advanced, expert, innovator, strategic };
enum class ResourceLevel { individual, club, contest, team, organization, government };
enum class Motive { financial_gain, ideology, notoriety, other };
enum class Intent { financial_theft, information_theft, disruption_of_service, extortion, other };

std::string_view to_string(OrgType v);
std::string_view to_string(Sophistication v);
std::string_view to_string(ResourceLevel v);
std::string_view to_string(Motive v);
std::string_view to_string(Intent v);

OrgType parse_org_type(std::string_view s);
Sophistication parse_sophistication(std::string_view s);
ResourceLevel parse_resource_level(std::string_view s);
Motive parse_motive(std::string_view s);
Intent parse_intent(std::string_view s);

// ---------------------------------------------------------------------------
// Domain records
// ---------------------------------------------------------------------------

/// Static organizational attributes of a (potential) victim.
class VictimProfile {
public:
    /// Throws EmptySectors, DuplicateSector or NegativeValue.
    VictimProfile(std::string name, CountryCode country, std::vector<IndustrySector> sectors,
                  std::int64_t revenue, std::int64_t employees, OrgType org_type);

    const std::string& name() const { return name_; }
    const CountryCode& country() const { return country_; }
    /// Sorted, duplicate-free, never empty.
    const std::vector<IndustrySector>& sectors() const { return sectors_; }
    std::int64_t revenue() const { return revenue_; }
    std::int64_t employees() const { return employees_; }
    OrgType org_type() const { return org_type_; }

    void set_country(CountryCode c) { country_ = std::move(c); }
    void set_org_type(OrgType t) { org_type_ = t; }
    void set_revenue(std::int64_t v);
    void set_employees(std::int64_t v);

    bool operator==(const VictimProfile&) const = default;

private:
    std::string name_;
    CountryCode country_;
    std::vector<IndustrySector> sectors_;
    std::int64_t revenue_;
    std::int64_t employees_;
    OrgType org_type_;
};

/// SKRAM / STIX threat-actor attributes of a ransomware operation.
class AdversaryProfile {
public:
    explicit AdversaryProfile(std::string name);
    /// Throws CapabilityMismatch when ttps is non-empty and its size differs
    /// from capability_count.
    AdversaryProfile(std::string name, std::set<std::string> aliases,
                     std::optional<Sophistication> sophistication, std::optional<Motive> motive,
                     std::set<Intent> intent, std::optional<ResourceLevel> resource_level,
                     std::int64_t capability_count, std::set<AttackTechniqueId> ttps);

    const std::string& name() const { return name_; }
    const std::set<std::string>& aliases() const { return aliases_; }
    const std::optional<Sophistication>& sophistication() const { return sophistication_; }
    const std::optional<Motive>& motive() const { return motive_; }
    const std::set<Intent>& intent() const { return intent_; }
    const std::optional<ResourceLevel>& resource_level() const { return resource_level_; }
    std::int64_t capability_count() const { return capability_count_; }
    const std::set<AttackTechniqueId>& ttps() const { return ttps_; }

    /// Case-insensitive match against the name and every alias.
    bool answers_to(std::string_view name) const;

    bool operator==(const AdversaryProfile&) const = default;

private:
    std::string name_;
    std::set<std::string> aliases_;
    std::optional<Sophistication> sophistication_;
    std::optional<Motive> motive_;
    std::set<Intent> intent_;
    std::optional<ResourceLevel> resource_level_;
    std::int64_t capability_count_ = 0;
    std::set<AttackTechniqueId> ttps_;
};

/// One (victim, adversary, date) observation, or a synthetic derivative of one.
struct AttackRecord {
    VictimProfile victim;
    std::string adversary_name;
    Date attack_date;
    std::optional<double> ewma;  // unset until the activity stage stamps it
    AdversaryProfile adversary;
    bool safe = false;           // false: attacked/unsafe, true: synthetic safe sample

    /// The smoothed activity, throwing MissingEwma when unstamped.
    double ewma_value() const;
    /// Throws NegativeEwma for negative or non-finite values.
    void stamp_ewma(double v);

    bool operator==(const AttackRecord&) const = default;
};

}  // namespace ransomrisk
