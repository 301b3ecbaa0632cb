#include "ransomrisk/dataset.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "ransomrisk/core/csv.hpp"
#include "ransomrisk/core/error.hpp"
#include "ransomrisk/core/json_io.hpp"
#include "ransomrisk/core/vocabulary.hpp"

namespace ransomrisk::dataset {

namespace {

template <typename Range, typename Fn>
std::string join(const Range& r, Fn&& fn) {
    std::string out;
    for (const auto& e : r) {
        if (!out.empty()) out.push_back(';');
        out += fn(e);
    }
    return out;
}

std::vector<std::string> split(std::string_view cell) {
    std::vector<std::string> out;
    if (cell.empty()) return out;
    std::size_t start = 0;
    while (true) {
        auto end = cell.find(';', start);
        out.emplace_back(cell.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    return out;
}

template <typename T>
T parse_number(const std::string& s, const char* what, std::size_t line) {
    T v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw Error("FormatError", "dataset line " + std::to_string(line) + ": bad " + what + " '" + s + "'");
    return v;
}

}  // namespace

const std::vector<std::string>& columns() {
    static const std::vector<std::string> cols = {
        "safe",      "group",    "victim_name",    "attack_date",    "country",          "sectors",
        "revenue",   "employees", "org_type",      "ewma",           "sophistication",   "motive",
        "intent",    "resource_level", "capability_count", "ttps"};
    return cols;
}

std::string to_csv(const std::vector<AttackRecord>& records) {
    std::string out = csv::join_row(columns()) + "\n";
    auto opt = [](const auto& o) { return o ? std::string(to_string(*o)) : std::string(); };
    for (const auto& r : records) {
        const auto& v = r.victim;
        const auto& a = r.adversary;
        out += csv::join_row({r.safe ? "1" : "0",
                              r.adversary_name,
                              v.name(),
                              r.attack_date.to_string(),
                              v.country().str(),
                              join(v.sectors(), [](const auto& s) { return s.str(); }),
                              std::to_string(v.revenue()),
                              std::to_string(v.employees()),
                              std::string(to_string(v.org_type())),
                              format_double(r.ewma_value()),
                              opt(a.sophistication()),
                              opt(a.motive()),
                              join(a.intent(), [](auto i) { return std::string(to_string(i)); }),
                              opt(a.resource_level()),
                              std::to_string(a.capability_count()),
                              join(a.ttps(), [](const auto& t) { return t.str(); })});
        out.push_back('\n');
    }
    return out;
}

std::vector<AttackRecord> from_csv(std::istream& in) {
    csv::Reader reader(in);
    auto header = reader.next();
    if (!header) return {};
    if (*header != columns()) throw Error("FormatError", "dataset header does not match the expected columns");

    std::vector<AttackRecord> out;
    while (auto row = reader.next()) {
        const auto line = reader.line_no();
        const auto& f = *row;
        if (f.size() != columns().size())
            throw Error("FormatError", "dataset line " + std::to_string(line) + ": wrong field count");
        try {
            std::vector<IndustrySector> sectors;
            for (const auto& s : split(f[5])) sectors.push_back(validate_sector(s));
            VictimProfile victim(f[2], validate_country(f[4]), std::move(sectors),
                                 parse_number<std::int64_t>(f[6], "revenue", line),
                                 parse_number<std::int64_t>(f[7], "employees", line), parse_org_type(f[8]));
            std::set<Intent> intents;
            for (const auto& s : split(f[12])) intents.insert(parse_intent(s));
            std::set<AttackTechniqueId> ttps;
            for (const auto& s : split(f[15])) ttps.insert(validate_technique(s));
            std::optional<Sophistication> soph;
            if (!f[10].empty()) soph = parse_sophistication(f[10]);
            std::optional<Motive> motive;
            if (!f[11].empty()) motive = parse_motive(f[11]);
            std::optional<ResourceLevel> resource;
            if (!f[13].empty()) resource = parse_resource_level(f[13]);
            AdversaryProfile adversary(f[1], {}, soph, motive, std::move(intents), resource,
                                       parse_number<std::int64_t>(f[14], "capability_count", line), std::move(ttps));
            AttackRecord r{std::move(victim), f[1], parse_date_or_throw(f[3]), std::nullopt, std::move(adversary),
                           false};
            r.stamp_ewma(parse_number<double>(f[9], "ewma", line));
            if (f[0] != "0" && f[0] != "1")
                throw Error("FormatError", "dataset line " + std::to_string(line) + ": safe must be 0 or 1");
            r.safe = f[0] == "1";
            out.push_back(std::move(r));
        } catch (const Error& e) {
            if (e.code() == "FormatError") throw;
            throw Error("FormatError", "dataset line " + std::to_string(line) + ": " + e.what());
        }
    }
    return out;
}

std::vector<AttackRecord> load_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("FileNotFound", "cannot open '" + path + "'");
    return from_csv(in);
}

}  // namespace ransomrisk::dataset
