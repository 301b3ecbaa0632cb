#include "ransomrisk/core/types.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <memory>
#include <mutex>

#include "ransomrisk/core/error.hpp"
#include "ransomrisk/core/json_io.hpp"
#include "ransomrisk/core/vocabulary.hpp"

namespace ransomrisk {

namespace {

std::string to_upper(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

struct Snapshot {
    std::mutex mutex;
    std::shared_ptr<const std::set<std::string>> ids;

    std::shared_ptr<const std::set<std::string>> get() {
        std::lock_guard lock(mutex);
        return ids;
    }
    void set(std::optional<std::set<std::string>> v) {
        std::lock_guard lock(mutex);
        ids = v ? std::make_shared<const std::set<std::string>>(std::move(*v)) : nullptr;
    }
};

Snapshot& technique_snapshot() {
    static Snapshot s;
    return s;
}
Snapshot& cve_snapshot() {
    static Snapshot s;
    return s;
}

template <typename Enum>
Enum parse_enum(std::string_view raw, const Vocabulary& vocab, const char* code) {
    const auto token = normalize_token(raw);
    const auto& values = vocab.values();
    auto it = std::find(values.begin(), values.end(), token);
    if (it == values.end()) throw Error(code, "'" + std::string(raw) + "'");
    return static_cast<Enum>(it - values.begin());
}

template <typename Enum>
std::string_view enum_name(Enum v, const Vocabulary& vocab) {
    return vocab.values().at(static_cast<std::size_t>(v));
}

}  // namespace

CountryCode validate_country(std::string_view code) {
    auto upper = to_upper(trim(code));
    if (upper.size() != 2 || !vocab::countries().contains(upper))
        throw Error("UnknownCountry", "'" + std::string(code) + "' is not an ISO 3166-1 alpha-2 code");
    return CountryCode(std::move(upper));
}

IndustrySector validate_sector(std::string_view value) {
    auto token = normalize_token(value);
    if (!vocab::industry_sectors().contains(token))
        throw Error("UnknownSector", "'" + std::string(value) + "' is not a STIX 2.1 industry sector");
    return IndustrySector(std::move(token));
}

bool is_technique_pattern(std::string_view id) {
    // T####, optionally .###
    if (id.size() != 5 && id.size() != 9) return false;
    if (id[0] != 'T' || !all_digits(id.substr(1, 4))) return false;
    if (id.size() == 9) return id[5] == '.' && all_digits(id.substr(6, 3));
    return true;
}

bool is_cve_pattern(std::string_view id) {
    if (id.size() < 13 || id.substr(0, 4) != "CVE-") return false;
    if (!all_digits(id.substr(4, 4)) || id[8] != '-') return false;
    return id.size() - 9 >= 4 && all_digits(id.substr(9));
}

AttackTechniqueId validate_technique(std::string_view id) {
    auto t = trim(id);
    if (!is_technique_pattern(t))
        throw Error("MalformedTechniqueId", "'" + std::string(id) + "' is not an ATT&CK technique id");
    if (auto snap = technique_snapshot().get(); snap && !snap->count(t))
        throw Error("UnknownTechniqueId", "'" + t + "' is not in the ATT&CK snapshot");
    return AttackTechniqueId(std::move(t));
}

CveId validate_cve(std::string_view id) {
    auto t = to_upper(trim(id));
    if (!is_cve_pattern(t)) throw Error("MalformedCveId", "'" + std::string(id) + "' is not a CVE id");
    if (auto snap = cve_snapshot().get(); snap && !snap->count(t))
        throw Error("UnknownCveId", "'" + t + "' is not in the CVE snapshot");
    return CveId(std::move(t));
}

void install_technique_snapshot(std::optional<std::set<std::string>> ids) { technique_snapshot().set(std::move(ids)); }
void install_cve_snapshot(std::optional<std::set<std::string>> ids) { cve_snapshot().set(std::move(ids)); }

std::set<std::string> load_id_snapshot(const std::string& path) {
    auto v = Vocabulary::load_file(path);
    return {v.values().begin(), v.values().end()};
}

std::string_view to_string(OrgType v) { return enum_name(v, vocab::org_types()); }
std::string_view to_string(Sophistication v) { return enum_name(v, vocab::sophistication_levels()); }
std::string_view to_string(ResourceLevel v) { return enum_name(v, vocab::resource_levels()); }
std::string_view to_string(Motive v) { return enum_name(v, vocab::motives()); }
std::string_view to_string(Intent v) { return enum_name(v, vocab::intents()); }

OrgType parse_org_type(std::string_view s) { return parse_enum<OrgType>(s, vocab::org_types(), "UnknownOrgType"); }
Sophistication parse_sophistication(std::string_view s) {
    return parse_enum<Sophistication>(s, vocab::sophistication_levels(), "UnknownSophistication");
}
ResourceLevel parse_resource_level(std::string_view s) {
    return parse_enum<ResourceLevel>(s, vocab::resource_levels(), "UnknownResourceLevel");
}
Motive parse_motive(std::string_view s) { return parse_enum<Motive>(s, vocab::motives(), "UnknownMotive"); }
Intent parse_intent(std::string_view s) { return parse_enum<Intent>(s, vocab::intents(), "UnknownIntent"); }

// --- VictimProfile ---------------------------------------------------------

VictimProfile::VictimProfile(std::string name, CountryCode country, std::vector<IndustrySector> sectors,
                             std::int64_t revenue, std::int64_t employees, OrgType org_type)
    : name_(std::move(name)),
      country_(std::move(country)),
      sectors_(std::move(sectors)),
      revenue_(0),
      employees_(0),
      org_type_(org_type) {
    if (sectors_.empty()) throw Error("EmptySectors", "victim '" + name_ + "' has no industry sector");
    std::sort(sectors_.begin(), sectors_.end());
    if (auto dup = std::adjacent_find(sectors_.begin(), sectors_.end()); dup != sectors_.end())
        throw Error("DuplicateSector", "victim '" + name_ + "' lists '" + dup->str() + "' twice");
    set_revenue(revenue);
    set_employees(employees);
}

void VictimProfile::set_revenue(std::int64_t v) {
    if (v < 0) throw Error("NegativeValue", "revenue of '" + name_ + "' is negative");
    revenue_ = v;
}

void VictimProfile::set_employees(std::int64_t v) {
    if (v < 0) throw Error("NegativeValue", "employees of '" + name_ + "' is negative");
    employees_ = v;
}

// --- AdversaryProfile ------------------------------------------------------

AdversaryProfile::AdversaryProfile(std::string name) : name_(std::move(name)) {}

AdversaryProfile::AdversaryProfile(std::string name, std::set<std::string> aliases,
                                   std::optional<Sophistication> sophistication, std::optional<Motive> motive,
                                   std::set<Intent> intent, std::optional<ResourceLevel> resource_level,
                                   std::int64_t capability_count, std::set<AttackTechniqueId> ttps)
    : name_(std::move(name)),
      aliases_(std::move(aliases)),
      sophistication_(sophistication),
      motive_(motive),
      intent_(std::move(intent)),
      resource_level_(resource_level),
      capability_count_(capability_count),
      ttps_(std::move(ttps)) {
    if (name_.empty()) throw Error("EmptyName", "adversary profile without a name");
    if (capability_count_ < 0) throw Error("NegativeValue", "capability_count of '" + name_ + "' is negative");
    if (!ttps_.empty() && capability_count_ != static_cast<std::int64_t>(ttps_.size()))
        throw Error("CapabilityMismatch", "'" + name_ + "' lists " + std::to_string(ttps_.size()) +
                                              " TTPs but capability_count " + std::to_string(capability_count_));
}

bool AdversaryProfile::answers_to(std::string_view name) const {
    const auto needle = to_lower(trim(name));
    if (needle == to_lower(name_)) return true;
    return std::any_of(aliases_.begin(), aliases_.end(), [&](const auto& a) { return to_lower(a) == needle; });
}

// --- AttackRecord ----------------------------------------------------------

double AttackRecord::ewma_value() const {
    if (!ewma) throw Error("MissingEwma", "record for '" + victim.name() + "' has no activity value");
    return *ewma;
}

void AttackRecord::stamp_ewma(double v) {
    if (!std::isfinite(v) || v < 0) throw Error("NegativeEwma", "activity value must be finite and >= 0");
    ewma = v;
}

}  // namespace ransomrisk
