#include "ransomrisk/core/json_io.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "ransomrisk/core/error.hpp"

namespace ransomrisk {

using nlohmann::json;

namespace {

template <typename T>
T get_field(const json& j, const char* key) {
    if (!j.contains(key)) throw Error("MissingField", std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw Error("BadField", std::string("field '") + key + "': " + e.what());
    }
}

}  // namespace

json to_json(const VictimProfile& v) {
    json sectors = json::array();
    for (const auto& s : v.sectors()) sectors.push_back(s.str());
    return {{"name", v.name()},
            {"country", v.country().str()},
            {"sectors", sectors},
            {"revenue", v.revenue()},
            {"employees", v.employees()},
            {"org_type", std::string(to_string(v.org_type()))}};
}

VictimProfile victim_from_json(const json& j) {
    std::vector<IndustrySector> sectors;
    for (const auto& s : get_field<std::vector<std::string>>(j, "sectors")) sectors.push_back(validate_sector(s));
    return VictimProfile(get_field<std::string>(j, "name"), validate_country(get_field<std::string>(j, "country")),
                         std::move(sectors), get_field<std::int64_t>(j, "revenue"),
                         get_field<std::int64_t>(j, "employees"),
                         parse_org_type(get_field<std::string>(j, "org_type")));
}

json to_json(const AdversaryProfile& a) {
    json intents = json::array();
    for (auto i : a.intent()) intents.push_back(std::string(to_string(i)));
    json ttps = json::array();
    for (const auto& t : a.ttps()) ttps.push_back(t.str());
    auto opt = [](const auto& o) -> json { return o ? json(std::string(to_string(*o))) : json(nullptr); };
    return {{"name", a.name()},
            {"aliases", a.aliases()},
            {"sophistication", opt(a.sophistication())},
            {"motive", opt(a.motive())},
            {"intent", intents},
            {"resource_level", opt(a.resource_level())},
            {"capability_count", a.capability_count()},
            {"ttps", ttps}};
}

AdversaryProfile adversary_from_json(const json& j) {
    auto opt_str = [&](const char* key) -> std::optional<std::string> {
        if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
        return get_field<std::string>(j, key);
    };
    std::set<std::string> aliases;
    if (j.contains("aliases")) aliases = get_field<std::set<std::string>>(j, "aliases");
    std::set<Intent> intents;
    if (j.contains("intent"))
        for (const auto& i : get_field<std::vector<std::string>>(j, "intent")) intents.insert(parse_intent(i));
    std::set<AttackTechniqueId> ttps;
    if (j.contains("ttps"))
        for (const auto& t : get_field<std::vector<std::string>>(j, "ttps")) ttps.insert(validate_technique(t));
    std::int64_t capability =
        j.contains("capability_count") ? get_field<std::int64_t>(j, "capability_count") : std::int64_t(ttps.size());

    std::optional<Sophistication> soph;
    if (auto s = opt_str("sophistication")) soph = parse_sophistication(*s);
    std::optional<Motive> motive;
    if (auto s = opt_str("motive")) motive = parse_motive(*s);
    std::optional<ResourceLevel> resource;
    if (auto s = opt_str("resource_level")) resource = parse_resource_level(*s);

    return AdversaryProfile(get_field<std::string>(j, "name"), std::move(aliases), soph, motive, std::move(intents),
                            resource, capability, std::move(ttps));
}

json to_json(const AttackRecord& r) {
    return {{"victim", to_json(r.victim)},
            {"adversary_name", r.adversary_name},
            {"attack_date", r.attack_date.to_string()},
            {"ewma", r.ewma ? json(*r.ewma) : json(nullptr)},
            {"adversary", to_json(r.adversary)},
            {"safe", r.safe ? 1 : 0}};
}

AttackRecord attack_from_json(const json& j) {
    AttackRecord r{victim_from_json(j.at("victim")), get_field<std::string>(j, "adversary_name"),
                   parse_date_or_throw(get_field<std::string>(j, "attack_date")), std::nullopt,
                   adversary_from_json(j.at("adversary")), false};
    if (j.contains("ewma") && !j.at("ewma").is_null()) r.stamp_ewma(get_field<double>(j, "ewma"));
    if (j.contains("safe")) {
        auto s = get_field<int>(j, "safe");
        if (s != 0 && s != 1) throw Error("BadField", "safe must be 0 or 1");
        r.safe = s == 1;
    }
    return r;
}

json to_json(const std::vector<AttackRecord>& records) {
    json arr = json::array();
    for (const auto& r : records) arr.push_back(to_json(r));
    return arr;
}

std::vector<AttackRecord> attacks_from_json(const json& j) {
    if (!j.is_array()) throw Error("BadField", "attack list must be a JSON array");
    std::vector<AttackRecord> out;
    out.reserve(j.size());
    for (const auto& e : j) out.push_back(attack_from_json(e));
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("FileNotFound", "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json_file(const std::string& path) {
    auto text = read_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error("MalformedJson", "'" + path + "': " + e.what());
    }
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("WriteFailed", "cannot write '" + path + "'");
    out << content;
    if (!out) throw Error("WriteFailed", "error writing '" + path + "'");
}

void write_json_file(const std::string& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

std::string format_double(double v) {
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

std::string sha256_hex(std::string_view data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(kHex[md[i] >> 4]);
        out.push_back(kHex[md[i] & 0xf]);
    }
    return out;
}

}  // namespace ransomrisk
