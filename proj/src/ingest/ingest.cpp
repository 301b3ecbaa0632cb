#include "ransomrisk/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "ransomrisk/core/csv.hpp"
#include "ransomrisk/core/vocabulary.hpp"

namespace ransomrisk::ingest {

using nlohmann::json;

namespace {

std::vector<std::string> split_sectors(std::string_view cell) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= cell.size()) {
        auto end = cell.find(';', start);
        if (end == std::string_view::npos) end = cell.size();
        auto token = trim(cell.substr(start, end - start));
        if (!token.empty()) out.push_back(std::move(token));
        start = end + 1;
    }
    return out;
}

std::int64_t parse_int(std::string_view text, const char* field) {
    auto t = trim(text);
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size())
        throw Error("FormatError", std::string(field) + " is not an integer: '" + t + "'");
    return v;
}

std::optional<std::string> opt_string(const json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    if (!j[key].is_string()) throw Error("FormatError", std::string(key) + " must be a string");
    return j[key].get<std::string>();
}

std::optional<std::int64_t> opt_int(const json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    const auto& v = j[key];
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float()) {
        double d = v.get<double>();
        if (d != static_cast<double>(static_cast<std::int64_t>(d)))
            throw Error("FormatError", std::string(key) + " must be an integer");
        return static_cast<std::int64_t>(d);
    }
    if (v.is_string()) return parse_int(v.get<std::string>(), key);
    throw Error("FormatError", std::string(key) + " must be an integer");
}

std::optional<std::vector<std::string>> opt_sectors(const json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    const auto& v = j[key];
    if (v.is_string()) return split_sectors(v.get<std::string>());
    if (!v.is_array()) throw Error("FormatError", std::string(key) + " must be a list of strings");
    std::vector<std::string> out;
    for (const auto& e : v) {
        if (!e.is_string()) throw Error("FormatError", std::string(key) + " must be a list of strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

PartialVictim partial_from_json(const json& j) {
    return {opt_string(j, "country"), opt_sectors(j, "sectors"), opt_int(j, "revenue"), opt_int(j, "employees"),
            opt_string(j, "org_type")};
}

RawVictimRecord record_from_json(const json& j) {
    if (!j.is_object()) throw Error("FormatError", "line is not a JSON object");
    auto group = opt_string(j, "group_name");
    auto victim = opt_string(j, "victim_name");
    auto discovered = opt_string(j, "discovered");
    if (!group || group->empty()) throw Error("FormatError", "missing group_name");
    if (!victim || victim->empty()) throw Error("FormatError", "missing victim_name");
    if (!discovered) throw Error("FormatError", "missing discovered");
    auto date = parse_date(*discovered);
    if (!date) throw Error("FormatError", "unparseable date '" + *discovered + "'");
    auto partial = partial_from_json(j);
    return {*group,
            *victim,
            *date,
            opt_string(j, "description").value_or(""),
            partial.country,
            partial.sectors,
            partial.revenue,
            partial.employees,
            partial.org_type};
}

void parse_jsonl(std::istream& in, ParseResult& out) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            out.records.push_back(record_from_json(json::parse(line)));
        } catch (const json::exception& e) {
            out.rejections.push_back({line_no, "", std::string("malformed JSON: ") + e.what()});
        } catch (const Error& e) {
            out.rejections.push_back({line_no, "", e.what()});
        }
    }
}

void parse_csv(std::istream& in, ParseResult& out) {
    csv::Reader reader(in);
    std::optional<std::vector<std::string>> header;
    try {
        header = reader.next();
    } catch (const Error& e) {
        out.rejections.push_back({reader.line_no(), "", e.what()});
        return;
    }
    if (!header) return;
    std::vector<std::string> names;
    for (const auto& h : *header) names.push_back(trim(h));

    while (true) {
        std::optional<std::vector<std::string>> row;
        try {
            row = reader.next();
        } catch (const Error& e) {
            out.rejections.push_back({reader.line_no(), "", e.what()});
            return;
        }
        if (!row) break;
        if (row->size() != names.size()) {
            out.rejections.push_back({reader.line_no(), "",
                                      "FormatError: expected " + std::to_string(names.size()) + " fields, got " +
                                          std::to_string(row->size())});
            continue;
        }
        json obj = json::object();
        for (std::size_t i = 0; i < names.size(); ++i) {
            const auto& cell = (*row)[i];
            if (cell.empty() && names[i] != "description") continue;  // absent optional
            obj[names[i]] = cell;
        }
        try {
            out.records.push_back(record_from_json(obj));
        } catch (const Error& e) {
            out.rejections.push_back({reader.line_no(), "", e.what()});
        }
    }
}

std::int64_t require_present(const std::optional<std::int64_t>& v) { return *v; }

}  // namespace

InputFormat parse_format(std::string_view name) {
    auto n = to_lower(name);
    if (n == "jsonl") return InputFormat::jsonl;
    if (n == "csv") return InputFormat::csv;
    throw Error("UnknownFormat", "victim format must be jsonl or csv, got '" + std::string(name) + "'",
                ErrorKind::usage);
}

ParseResult parse_victims(std::istream& in, InputFormat format) {
    ParseResult out;
    if (format == InputFormat::jsonl)
        parse_jsonl(in, out);
    else
        parse_csv(in, out);
    return out;
}

std::vector<RawVictimRecord> filter_records(const std::vector<RawVictimRecord>& records, const FilterPolicy& policy) {
    std::set<std::string> known;
    for (const auto& k : policy.known_adversaries) known.insert(to_lower(trim(k)));
    std::vector<RawVictimRecord> out;
    for (const auto& r : records) {
        if (r.discovered < policy.cutoff_date) continue;
        if (!known.count(to_lower(trim(r.group_name)))) continue;
        if (policy.require_description && trim(r.description).empty()) continue;
        out.push_back(r);
    }
    return out;
}

void Directory::add(const std::string& victim_name, PartialVictim entry) {
    entries_[to_lower(trim(victim_name))] = std::move(entry);
}

const PartialVictim* Directory::find(std::string_view victim_name) const {
    auto it = entries_.find(to_lower(trim(victim_name)));
    return it == entries_.end() ? nullptr : &it->second;
}

Directory Directory::from_json(const json& j) {
    if (!j.is_object()) throw Error("FormatError", "directory must be a JSON object keyed by victim name");
    Directory d;
    for (const auto& [name, entry] : j.items()) {
        if (!entry.is_object()) throw Error("FormatError", "directory entry '" + name + "' is not an object");
        d.add(name, partial_from_json(entry));
    }
    return d;
}

namespace {
std::string join_names(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& e : v) s += (s.empty() ? "" : ", ") + e;
    return s;
}
}  // namespace

IncompleteProfile::IncompleteProfile(const std::string& victim, std::vector<std::string> missing)
    : Error("IncompleteProfile", "'" + victim + "' lacks " + join_names(missing)), missing_(std::move(missing)) {}

VictimProfile enrich_victim(const RawVictimRecord& raw, const Directory& directory) {
    const PartialVictim* dir = directory.find(raw.victim_name);
    auto pick = [&](const auto& raw_field, auto member) {
        using T = std::decay_t<decltype(raw_field)>;
        if (raw_field) return raw_field;
        if (dir) return T((dir->*member));
        return T{};
    };
    auto country = pick(raw.country, &PartialVictim::country);
    auto sectors = pick(raw.sectors, &PartialVictim::sectors);
    auto revenue = pick(raw.revenue, &PartialVictim::revenue);
    auto employees = pick(raw.employees, &PartialVictim::employees);
    auto org_type = pick(raw.org_type, &PartialVictim::org_type);

    std::vector<std::string> missing;
    if (!country) missing.push_back("country");
    if (!sectors || sectors->empty()) missing.push_back("sectors");
    if (!revenue) missing.push_back("revenue");
    if (!employees) missing.push_back("employees");
    if (!org_type) missing.push_back("org_type");
    if (!missing.empty()) throw IncompleteProfile(raw.victim_name, std::move(missing));

    std::vector<IndustrySector> typed;
    for (const auto& s : *sectors) typed.push_back(validate_sector(s));
    std::sort(typed.begin(), typed.end());
    typed.erase(std::unique(typed.begin(), typed.end()), typed.end());
    return VictimProfile(raw.victim_name, validate_country(*country), std::move(typed), require_present(revenue),
                         require_present(employees), parse_org_type(*org_type));
}

AdversaryIndex::AdversaryIndex(std::vector<AdversaryProfile> profiles) : profiles_(std::move(profiles)) {
    for (std::size_t i = 0; i < profiles_.size(); ++i) {
        const auto& p = profiles_[i];
        auto claim = [&](const std::string& key) {
            auto k = to_lower(trim(key));
            auto [it, inserted] = by_name_.emplace(k, i);
            if (!inserted && it->second != i)
                throw Error("AmbiguousAlias", "'" + key + "' names both '" + profiles_[it->second].name() + "' and '" +
                                                  p.name() + "'");
        };
        claim(p.name());
        for (const auto& a : p.aliases()) claim(a);
    }
}

const AdversaryProfile* AdversaryIndex::find(std::string_view name_or_alias) const {
    auto it = by_name_.find(to_lower(trim(name_or_alias)));
    return it == by_name_.end() ? nullptr : &profiles_[it->second];
}

std::set<std::string> AdversaryIndex::known_names() const {
    std::set<std::string> out;
    for (const auto& [k, _] : by_name_) out.insert(k);
    return out;
}

std::vector<AttackRecord> join_attacks(const std::vector<VictimEvent>& events, const AdversaryIndex& adversaries) {
    std::vector<AttackRecord> out;
    out.reserve(events.size());
    for (const auto& e : events) {
        const auto* adv = adversaries.find(e.group_name);
        if (!adv) throw Error("UnknownAdversary", "'" + e.group_name + "' is not a known adversary");
        out.push_back(AttackRecord{e.victim, adv->name(), e.date, std::nullopt, *adv, false});
    }
    return out;
}

IngestResult run_ingest(std::istream& victims, InputFormat format, const Directory& directory,
                        const AdversaryIndex& adversaries, Date cutoff, bool require_description) {
    IngestResult result;
    auto parsed = parse_victims(victims, format);
    result.parsed = parsed.records.size();
    result.rejections = std::move(parsed.rejections);

    FilterPolicy policy{cutoff, adversaries.known_names(), require_description};
    auto kept = filter_records(parsed.records, policy);

    std::vector<VictimEvent> events;
    for (const auto& r : kept) {
        try {
            events.push_back({enrich_victim(r, directory), r.group_name, r.discovered});
        } catch (const Error& e) {
            result.rejections.push_back({0, r.victim_name, e.what()});
        }
    }
    result.retained = events.size();
    result.attacks = join_attacks(events, adversaries);
    return result;
}

json to_json(const std::vector<Rejection>& rejections) {
    json arr = json::array();
    for (const auto& r : rejections) {
        json j = {{"reason", r.reason}};
        if (r.line_no) j["line"] = r.line_no;
        if (!r.subject.empty()) j["victim"] = r.subject;
        arr.push_back(std::move(j));
    }
    return arr;
}

}  // namespace ransomrisk::ingest
