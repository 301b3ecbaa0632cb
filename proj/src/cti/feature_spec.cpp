#include "ransomrisk/cti/feature_spec.hpp"

#include <algorithm>
#include <filesystem>
#include <set>

#include <yaml-cpp/yaml.h>

#include "ransomrisk/core/error.hpp"
#include "ransomrisk/core/json_io.hpp"
#include "ransomrisk/core/types.hpp"
#include "ransomrisk/core/vocabulary.hpp"

namespace ransomrisk::cti {

namespace {

std::string key_of(std::string_view standard) { return to_lower(trim(standard)); }

Error spec_error(const std::string& msg) { return Error("InvalidFeatureSpec", msg, ErrorKind::usage); }

nlohmann::json yaml_to_json(const YAML::Node& n) {
    switch (n.Type()) {
        case YAML::NodeType::Null:
        case YAML::NodeType::Undefined:
            return nullptr;
        case YAML::NodeType::Scalar:
            return n.as<std::string>();
        case YAML::NodeType::Sequence: {
            auto arr = nlohmann::json::array();
            for (const auto& item : n) arr.push_back(yaml_to_json(item));
            return arr;
        }
        case YAML::NodeType::Map: {
            auto obj = nlohmann::json::object();
            for (const auto& kv : n) obj[kv.first.as<std::string>()] = yaml_to_json(kv.second);
            return obj;
        }
    }
    return nullptr;
}

std::string scalar(const YAML::Node& root, const char* key, bool required) {
    auto n = root[key];
    if (!n) {
        if (required) throw spec_error(std::string("missing key '") + key + "'");
        return {};
    }
    if (!n.IsScalar()) throw spec_error(std::string("key '") + key + "' must be a string");
    return trim(n.as<std::string>());
}

}  // namespace

StandardRegistry StandardRegistry::defaults() {
    StandardRegistry r;
    r.add("Enumerated STIX Industry Sectors", [](std::string_view v) { return validate_sector(v).str(); });
    r.add("ISO 3166-1 alpha-2", [](std::string_view v) { return validate_country(v).str(); });
    r.add("MITRE ATT&CK technique IDs", [](std::string_view v) { return validate_technique(v).str(); });
    r.add("CVE identifiers", [](std::string_view v) { return validate_cve(v).str(); });
    r.add("STIX threat actor sophistication",
          [](std::string_view v) { return std::string(to_string(parse_sophistication(v))); });
    r.add("STIX attack resource level",
          [](std::string_view v) { return std::string(to_string(parse_resource_level(v))); });
    r.add("STIX attack motivation", [](std::string_view v) { return std::string(to_string(parse_motive(v))); });
    r.add("STIX threat actor intent", [](std::string_view v) { return std::string(to_string(parse_intent(v))); });
    r.add("Organization type", [](std::string_view v) { return std::string(to_string(parse_org_type(v))); });
    r.add("Free text", [](std::string_view v) {
        auto t = trim(v);
        if (t.empty()) throw Error("EmptyValue", "empty text");
        return t;
    });
    return r;
}

void StandardRegistry::add(std::string_view standard, Validator v) {
    validators_[key_of(standard)] = {std::string(standard), std::move(v)};
}

bool StandardRegistry::has(std::string_view standard) const { return validators_.count(key_of(standard)) > 0; }

const Validator& StandardRegistry::get(std::string_view standard) const {
    auto it = validators_.find(key_of(standard));
    if (it == validators_.end())
        throw Error("UnknownStandard", "no validator registered for '" + std::string(standard) + "'", ErrorKind::usage);
    return it->second.second;
}

std::vector<std::string> StandardRegistry::names() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : validators_) out.push_back(v.first);
    return out;
}

FeatureSpec parse_feature_spec(std::string_view text) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::Exception& e) {
        throw spec_error(e.what());
    }
    if (!root.IsMap()) throw spec_error("document must be a mapping");

    FeatureSpec spec;
    spec.name = scalar(root, "name", true);
    if (spec.name.empty()) throw spec_error("empty name");
    spec.intent = scalar(root, "intent", true);
    spec.guidance = scalar(root, "guidance", false);
    spec.standard = scalar(root, "standard", true);

    if (auto ex = root["examples"]) {
        if (!ex.IsSequence()) throw spec_error("'examples' must be a list");
        for (const auto& e : ex) {
            if (!e.IsMap() || !e["sample"] || !e["answer"])
                throw spec_error("each example needs 'sample' and 'answer'");
            spec.examples.push_back({trim(e["sample"].as<std::string>()), yaml_to_json(e["answer"])});
        }
    }
    if (auto pr = root["process"]) {
        if (pr.IsScalar()) {
            spec.process.push_back(trim(pr.as<std::string>()));
        } else if (pr.IsSequence()) {
            for (const auto& step : pr) spec.process.push_back(trim(step.as<std::string>()));
        } else {
            throw spec_error("'process' must be a list of steps");
        }
    }
    return spec;
}

void check_bundle(const std::vector<FeatureSpec>& specs, const StandardRegistry& registry) {
    std::set<std::string> seen;
    for (const auto& s : specs) {
        if (s.name.empty()) throw spec_error("empty feature name");
        if (!seen.insert(s.name).second) throw spec_error("duplicate feature name '" + s.name + "'");
        if (!registry.has(s.standard))
            throw spec_error("feature '" + s.name + "' names unregistered standard '" + s.standard + "'");
    }
}

std::vector<FeatureSpec> load_prompt_bundle(const std::string& dir, const StandardRegistry& registry) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw Error("FileNotFound", "prompt directory " + dir, ErrorKind::usage);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        auto ext = entry.path().extension().string();
        if (entry.is_regular_file() && (ext == ".yaml" || ext == ".yml")) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<FeatureSpec> specs;
    for (const auto& f : files) {
        try {
            specs.push_back(parse_feature_spec(read_file(f.string())));
        } catch (const Error& e) {
            if (e.code() != "InvalidFeatureSpec") throw;
            throw spec_error(f.filename().string() + ": " + e.what());
        }
    }
    check_bundle(specs, registry);
    return specs;
}

}  // namespace ransomrisk::cti
