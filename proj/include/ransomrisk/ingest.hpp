#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "ransomrisk/core/error.hpp"
#include "ransomrisk/core/types.hpp"

namespace ransomrisk::ingest {

/// One row of a leak-site tracker export, before validation.
struct RawVictimRecord {
    std::string group_name;
    std::string victim_name;
    Date discovered;
    std::string description;
    std::optional<std::string> country;
    std::optional<std::vector<std::string>> sectors;
    std::optional<std::int64_t> revenue;
    std::optional<std::int64_t> employees;
    std::optional<std::string> org_type;

    bool operator==(const RawVictimRecord&) const = default;
};

struct Rejection {
    std::size_t line_no = 0;  // 0 when the rejection is not tied to an input line
    std::string subject;      // victim name when known
    std::string reason;
};

struct ParseResult {
    std::vector<RawVictimRecord> records;
    std::vector<Rejection> rejections;
};

enum class InputFormat { jsonl, csv };
InputFormat parse_format(std::string_view name);

/// One record per line (JSONL) or row (CSV with a header naming the
/// RawVictimRecord fields; sectors separated by ';'). Bad lines land in
/// `rejections` with their line number.
ParseResult parse_victims(std::istream& in, InputFormat format);

struct FilterPolicy {
    Date cutoff_date{2021, 1, 1};
    std::set<std::string> known_adversaries;  // names and aliases, any case
    bool require_description = true;
};

/// Keeps records discovered on/after the cutoff, attributed to a known
/// adversary (case-insensitive), and with a description when required.
/// Order is preserved.
std::vector<RawVictimRecord> filter_records(const std::vector<RawVictimRecord>& records, const FilterPolicy& policy);

/// Partial organizational attributes from an offline enrichment source.
struct PartialVictim {
    std::optional<std::string> country;
    std::optional<std::vector<std::string>> sectors;
    std::optional<std::int64_t> revenue;
    std::optional<std::int64_t> employees;
    std::optional<std::string> org_type;
};

/// Victim name (matched case-insensitively) → partial profile.
class Directory {
public:
    Directory() = default;
    void add(const std::string& victim_name, PartialVictim entry);
    const PartialVictim* find(std::string_view victim_name) const;
    std::size_t size() const { return entries_.size(); }

    /// JSON object keyed by victim name, values carrying any of the
    /// country/sectors/revenue/employees/org_type fields.
    static Directory from_json(const nlohmann::json& j);

private:
    std::map<std::string, PartialVictim> entries_;
};

class IncompleteProfile : public Error {
public:
    IncompleteProfile(const std::string& victim, std::vector<std::string> missing);
    const std::vector<std::string>& missing() const { return missing_; }

private:
    std::vector<std::string> missing_;
};

/// Raw fields win; gaps are filled from the directory. Throws
/// IncompleteProfile listing every field still absent, or a validation
/// Error for out-of-vocabulary values.
VictimProfile enrich_victim(const RawVictimRecord& raw, const Directory& directory);

/// Adversary profiles indexed by name and alias (case-insensitive, exact).
class AdversaryIndex {
public:
    AdversaryIndex() = default;
    explicit AdversaryIndex(std::vector<AdversaryProfile> profiles);

    const AdversaryProfile* find(std::string_view name_or_alias) const;
    const std::vector<AdversaryProfile>& profiles() const { return profiles_; }
    /// Every name and alias, lowercased.
    std::set<std::string> known_names() const;

private:
    std::vector<AdversaryProfile> profiles_;
    std::map<std::string, std::size_t> by_name_;
};

struct VictimEvent {
    VictimProfile victim;
    std::string group_name;
    Date date;
};

/// One unsafe AttackRecord per event, adversary resolved through aliases,
/// ewma left unset. Throws Error("UnknownAdversary").
std::vector<AttackRecord> join_attacks(const std::vector<VictimEvent>& events, const AdversaryIndex& adversaries);

struct IngestResult {
    std::vector<AttackRecord> attacks;
    std::vector<Rejection> rejections;
    std::size_t parsed = 0;
    std::size_t retained = 0;
};

/// parse → filter → enrich → join. Enrichment failures become rejections.
IngestResult run_ingest(std::istream& victims, InputFormat format, const Directory& directory,
                        const AdversaryIndex& adversaries, Date cutoff, bool require_description = true);

nlohmann::json to_json(const std::vector<Rejection>& rejections);

}  // namespace ransomrisk::ingest
