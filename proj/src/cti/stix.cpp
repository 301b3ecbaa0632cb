#include "ransomrisk/cti/stix.hpp"

#include <algorithm>
#include <mutex>
#include <set>

#include "ransomrisk/core/error.hpp"
#include "ransomrisk/core/json_io.hpp"
#include "ransomrisk/core/vocabulary.hpp"

namespace ransomrisk::cti {

namespace {

const char* const kListProps[] = {"aliases", "goals", "targeted_sectors", "targeted_countries"};
const char* const kScalarProps[] = {"name", "sophistication", "resource_level", "primary_motivation"};

nlohmann::json sorted_union(const nlohmann::json& a, const nlohmann::json& b) {
    std::set<std::string> s;
    for (const auto* src : {&a, &b})
        if (src->is_array())
            for (const auto& v : *src) s.insert(v.get<std::string>());
    return nlohmann::json(std::vector<std::string>(s.begin(), s.end()));
}

nlohmann::json merge_actor(const nlohmann::json& old_props, const nlohmann::json& new_props) {
    auto out = old_props;
    for (const char* k : kListProps)
        if (old_props.contains(k) || new_props.contains(k))
            out[k] = sorted_union(old_props.value(k, nlohmann::json()), new_props.value(k, nlohmann::json()));
    for (auto it = new_props.begin(); it != new_props.end(); ++it) {
        if (std::find(std::begin(kListProps), std::end(kListProps), it.key()) != std::end(kListProps)) continue;
        if (it.key() == "x_rationales" && it->is_object()) {
            auto merged = out.value("x_rationales", nlohmann::json::object());
            merged.update(*it);
            out["x_rationales"] = merged;
        } else if (!it->is_null()) {
            out[it.key()] = *it;
        }
    }
    return out;
}

}  // namespace

std::string_view to_string(StixType t) {
    switch (t) {
        case StixType::threat_actor: return "threat-actor";
        case StixType::relationship: return "relationship";
        case StixType::attack_pattern_ref: return "attack-pattern-ref";
        case StixType::vulnerability_ref: return "vulnerability-ref";
    }
    return "threat-actor";
}

StixType parse_stix_type(std::string_view s) {
    for (auto t : {StixType::threat_actor, StixType::relationship, StixType::attack_pattern_ref,
                   StixType::vulnerability_ref})
        if (to_string(t) == s) return t;
    throw Error("MalformedStixObject", "unknown object type '" + std::string(s) + "'");
}

nlohmann::json StixObject::to_json() const {
    auto j = properties;
    j["type"] = std::string(to_string(type));
    j["id"] = id;
    return j;
}

StixObject StixObject::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("type") || !j.contains("id"))
        throw Error("MalformedStixObject", "object needs 'type' and 'id'");
    StixObject o;
    o.type = parse_stix_type(j.at("type").get<std::string>());
    o.id = j.at("id").get<std::string>();
    auto prefix = std::string(to_string(o.type)) + "--";
    if (o.id.rfind(prefix, 0) != 0) throw Error("MalformedStixObject", "id '" + o.id + "' lacks prefix " + prefix);
    o.properties = j;
    o.properties.erase("type");
    o.properties.erase("id");
    return o;
}

std::string deterministic_id(StixType type, std::string_view key, std::uint64_t seed) {
    std::string material = std::to_string(seed);
    material += '\x1f';
    material += to_string(type);
    material += '\x1f';
    material += key;
    auto h = sha256_hex(material).substr(0, 32);
    h[12] = '5';
    static const char* kVariant = "89ab";
    int nib = std::stoi(std::string(1, h[16]), nullptr, 16);
    h[16] = kVariant[nib & 0x3];
    return std::string(to_string(type)) + "--" + h.substr(0, 8) + "-" + h.substr(8, 4) + "-" + h.substr(12, 4) +
           "-" + h.substr(16, 4) + "-" + h.substr(20, 12);
}

std::vector<StixObject> synthesize_stix(const ValidatedFeatures& features, const std::string& adversary_name,
                                        std::uint64_t seed) {
    namespace fk = feature_keys;
    auto extracted = trim(features.first(fk::adversary_name));
    auto name = trim(adversary_name);
    if (name.empty()) name = extracted;
    if (name.empty()) throw Error("MissingCoreIdentity", "no adversary name extracted or supplied");

    std::set<std::string> aliases;
    for (const auto& a : features.values(fk::aliases))
        if (to_lower(a) != to_lower(name)) aliases.insert(a);
    if (!extracted.empty() && to_lower(extracted) != to_lower(name)) aliases.insert(extracted);

    StixObject actor;
    actor.type = StixType::threat_actor;
    actor.id = deterministic_id(StixType::threat_actor, to_lower(name), seed);
    auto& p = actor.properties;
    p["name"] = name;
    if (!aliases.empty()) p["aliases"] = std::vector<std::string>(aliases.begin(), aliases.end());
    if (auto s = features.first(fk::sophistication); !s.empty()) p["sophistication"] = s;
    if (auto r = features.first(fk::resource_level); !r.empty()) p["resource_level"] = r;
    if (auto m = features.first(fk::motive); !m.empty()) p["primary_motivation"] = m;
    auto put_list = [&](const char* key, const char* feature) {
        auto vals = features.values(feature);
        std::sort(vals.begin(), vals.end());
        if (!vals.empty()) p[key] = vals;
    };
    put_list("goals", fk::intent);
    put_list("targeted_sectors", fk::sectors);
    put_list("targeted_countries", fk::countries);
    auto rationales = nlohmann::json::object();
    for (const auto& f : features.features)
        if (!f.rationale.empty()) rationales[f.name] = f.rationale;
    if (!rationales.empty()) p["x_rationales"] = rationales;

    std::vector<StixObject> out{actor};
    auto link = [&](StixType ref_type, const std::string& external_id, const char* verb) {
        StixObject ref{deterministic_id(ref_type, external_id, seed), ref_type, {{"external_id", external_id}}};
        StixObject rel{deterministic_id(StixType::relationship, actor.id + "|" + verb + "|" + ref.id, seed),
                       StixType::relationship,
                       {{"relationship_type", verb}, {"source_ref", actor.id}, {"target_ref", ref.id}}};
        out.push_back(std::move(ref));
        out.push_back(std::move(rel));
    };
    for (const auto& t : features.values(fk::ttps)) link(StixType::attack_pattern_ref, t, "uses");
    for (const auto& c : features.values(fk::cves)) link(StixType::vulnerability_ref, c, "exploits");
    return out;
}

// ---------------------------------------------------------------------------

StixStore::StixStore(const StixStore& other) {
    std::shared_lock lock(other.mutex_);
    objects_ = other.objects_;
}

StixStore& StixStore::operator=(const StixStore& other) {
    if (this == &other) return *this;
    std::map<std::string, StixObject> copy;
    {
        std::shared_lock lock(other.mutex_);
        copy = other.objects_;
    }
    std::unique_lock lock(mutex_);
    objects_ = std::move(copy);
    return *this;
}

std::vector<std::string> StixStore::store_objects(const std::vector<StixObject>& objects) {
    std::unique_lock lock(mutex_);
    std::set<std::string> batch;
    for (const auto& o : objects) batch.insert(o.id);
    for (const auto& o : objects) {
        if (o.type != StixType::relationship) continue;
        for (const char* k : {"source_ref", "target_ref"}) {
            auto ref = o.properties.value(k, std::string());
            if (!objects_.count(ref) && !batch.count(ref))
                throw Error("DanglingReference", o.id + " " + k + " '" + ref + "' is not stored");
        }
    }
    std::vector<std::string> ids;
    for (const auto& o : objects) {
        auto it = objects_.find(o.id);
        if (it == objects_.end()) {
            objects_.emplace(o.id, o);
        } else if (o.type == StixType::threat_actor) {
            it->second.properties = merge_actor(it->second.properties, o.properties);
        }
        ids.push_back(o.id);
    }
    return ids;
}

std::optional<StixObject> StixStore::get(const std::string& id) const {
    std::shared_lock lock(mutex_);
    auto it = objects_.find(id);
    if (it == objects_.end()) return std::nullopt;
    return it->second;
}

std::size_t StixStore::size() const {
    std::shared_lock lock(mutex_);
    return objects_.size();
}

const StixObject* StixStore::find_actor(std::string_view name) const {
    auto needle = to_lower(trim(name));
    for (const auto& [id, o] : objects_) {
        if (o.type != StixType::threat_actor) continue;
        if (to_lower(o.properties.value("name", std::string())) == needle) return &o;
    }
    for (const auto& [id, o] : objects_) {
        if (o.type != StixType::threat_actor || !o.properties.contains("aliases")) continue;
        for (const auto& a : o.properties.at("aliases"))
            if (to_lower(a.get<std::string>()) == needle) return &o;
    }
    return nullptr;
}

std::optional<std::string> StixStore::resolve_actor(std::string_view name) const {
    std::shared_lock lock(mutex_);
    auto* a = find_actor(name);
    if (!a) return std::nullopt;
    return a->properties.value("name", std::string());
}

AdversaryProfile StixStore::assemble(const StixObject& actor) const {
    const auto& p = actor.properties;
    std::set<std::string> aliases;
    if (p.contains("aliases"))
        for (const auto& a : p.at("aliases")) aliases.insert(a.get<std::string>());
    std::optional<Sophistication> soph;
    if (p.contains("sophistication")) soph = parse_sophistication(p.at("sophistication").get<std::string>());
    std::optional<ResourceLevel> res;
    if (p.contains("resource_level")) res = parse_resource_level(p.at("resource_level").get<std::string>());
    std::optional<Motive> motive;
    if (p.contains("primary_motivation")) motive = parse_motive(p.at("primary_motivation").get<std::string>());
    std::set<Intent> intent;
    if (p.contains("goals"))
        for (const auto& g : p.at("goals")) intent.insert(parse_intent(g.get<std::string>()));

    std::set<AttackTechniqueId> ttps;
    for (const auto& [id, o] : objects_) {
        if (o.type != StixType::relationship) continue;
        if (o.properties.value("source_ref", std::string()) != actor.id) continue;
        if (o.properties.value("relationship_type", std::string()) != "uses") continue;
        auto target = objects_.find(o.properties.value("target_ref", std::string()));
        if (target == objects_.end() || target->second.type != StixType::attack_pattern_ref) continue;
        ttps.insert(validate_technique(target->second.properties.value("external_id", std::string())));
    }
    auto count = static_cast<std::int64_t>(ttps.size());
    return AdversaryProfile(p.value("name", std::string()), std::move(aliases), soph, motive, std::move(intent), res,
                            count, std::move(ttps));
}

AdversaryProfile StixStore::query_adversary(std::string_view name) const {
    std::shared_lock lock(mutex_);
    auto* a = find_actor(name);
    if (!a) throw Error("UnknownAdversary", "no threat-actor named '" + std::string(name) + "' in the store");
    return assemble(*a);
}

std::vector<AdversaryProfile> StixStore::adversaries() const {
    std::shared_lock lock(mutex_);
    std::vector<AdversaryProfile> out;
    for (const auto& [id, o] : objects_)
        if (o.type == StixType::threat_actor) out.push_back(assemble(o));
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.name() < b.name(); });
    return out;
}

nlohmann::json StixStore::to_json() const {
    std::shared_lock lock(mutex_);
    auto objs = nlohmann::json::array();
    std::string ids;
    for (const auto& [id, o] : objects_) {
        objs.push_back(o.to_json());
        ids += id;
    }
    auto bundle_uuid = deterministic_id(StixType::threat_actor, ids, 0).substr(std::string("threat-actor--").size());
    return {{"type", "bundle"}, {"id", "bundle--" + bundle_uuid}, {"spec_version", "2.1"}, {"objects", objs}};
}

bool is_stix_bundle(const nlohmann::json& j) {
    return j.is_object() && j.value("type", std::string()) == "bundle";
}

StixStore StixStore::from_json(const nlohmann::json& j) {
    if (!is_stix_bundle(j) || !j.contains("objects") || !j.at("objects").is_array())
        throw Error("MalformedStixObject", "store document is not a bundle with an objects array");
    std::vector<StixObject> objs;
    for (const auto& o : j.at("objects")) objs.push_back(StixObject::from_json(o));
    StixStore store;
    store.store_objects(objs);
    return store;
}

StixStore StixStore::load(const std::string& path) { return from_json(read_json_file(path)); }

void StixStore::save(const std::string& path) const { write_json_file(path, to_json()); }

}  // namespace ransomrisk::cti
