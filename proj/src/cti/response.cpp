#include "ransomrisk/cti/response.hpp"

#include <algorithm>

#include "ransomrisk/core/error.hpp"

namespace ransomrisk::cti {

namespace {

bool is_space(char c) { return c == ' ' || c == '\n' || c == '\r' || c == '\t'; }

// Removes a leading ```lang line and a trailing ``` when both wrap the text.
std::string strip_fences(std::string s) {
    std::size_t b = 0;
    while (b < s.size() && is_space(s[b])) ++b;
    std::size_t e = s.size();
    while (e > b && is_space(s[e - 1])) --e;
    s = s.substr(b, e - b);
    if (s.rfind("```", 0) == 0) {
        auto nl = s.find('\n');
        s = nl == std::string::npos ? std::string() : s.substr(nl + 1);
        if (s.size() >= 3 && s.compare(s.size() - 3, 3, "```") == 0) s.resize(s.size() - 3);
    }
    return s;
}

}  // namespace

nlohmann::json serialize_responses(const std::vector<RawResponse>& parts) {
    if (parts.empty()) throw Error("NonContiguousParts", "no parts to serialize");
    std::vector<const RawResponse*> ordered;
    for (const auto& p : parts) ordered.push_back(&p);
    std::sort(ordered.begin(), ordered.end(),
              [](const RawResponse* a, const RawResponse* b) { return a->part_index < b->part_index; });
    std::string unified;
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        if (ordered[i]->part_index != i)
            throw Error("NonContiguousParts", "expected part " + std::to_string(i) + ", found part " +
                                                  std::to_string(ordered[i]->part_index));
        unified += ordered[i]->text;
    }
    try {
        return nlohmann::json::parse(strip_fences(std::move(unified)));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error("UnparseableUnifiedResponse", e.what());
    }
}

const FeatureResult* ValidatedFeatures::find(std::string_view name) const {
    for (const auto& f : features)
        if (f.name == name) return &f;
    return nullptr;
}

std::string ValidatedFeatures::first(std::string_view name) const {
    auto* f = find(name);
    return f && !f->accepted.empty() ? f->accepted.front() : std::string();
}

std::vector<std::string> ValidatedFeatures::values(std::string_view name) const {
    auto* f = find(name);
    return f ? f->accepted : std::vector<std::string>{};
}

nlohmann::json ValidatedFeatures::to_json() const {
    auto out = nlohmann::json::object();
    for (const auto& f : features) {
        auto rej = nlohmann::json::array();
        for (const auto& [raw, reason] : f.rejections) rej.push_back({{"value", raw}, {"reason", reason}});
        out[f.name] = {{"standard", f.standard},
                       {"accepted", f.accepted},
                       {"rationale", f.rationale},
                       {"rejections", rej},
                       {"missing", f.missing}};
    }
    return out;
}

ValidatedFeatures validate_features(const nlohmann::json& unified, const std::vector<FeatureSpec>& specs,
                                    const StandardRegistry& registry) {
    ValidatedFeatures out;
    for (const auto& spec : specs) {
        FeatureResult r;
        r.name = spec.name;
        r.standard = spec.standard;
        if (!unified.is_object() || !unified.contains(spec.name)) {
            r.missing = true;
            out.features.push_back(std::move(r));
            continue;
        }
        const auto& entry = unified.at(spec.name);
        nlohmann::json value = entry;
        if (entry.is_object() && (entry.contains("value") || entry.contains("rationale"))) {
            value = entry.value("value", nlohmann::json());
            if (entry.contains("rationale")) {
                const auto& rat = entry.at("rationale");
                r.rationale = rat.is_string() ? rat.get<std::string>() : (rat.is_null() ? "" : rat.dump());
            }
        }

        std::vector<nlohmann::json> raw;
        if (value.is_array()) {
            raw.assign(value.begin(), value.end());
        } else if (!value.is_null()) {
            raw.push_back(value);
        }

        const auto& validator = registry.get(spec.standard);
        for (const auto& v : raw) {
            std::string text;
            if (v.is_string()) {
                text = v.get<std::string>();
            } else if (v.is_number() || v.is_boolean()) {
                text = v.dump();
            } else {
                r.rejections.emplace_back(v.dump(), "not a scalar value");
                continue;
            }
            try {
                auto norm = validator(text);
                if (std::find(r.accepted.begin(), r.accepted.end(), norm) == r.accepted.end())
                    r.accepted.push_back(std::move(norm));
            } catch (const Error& e) {
                r.rejections.emplace_back(text, e.what());
            }
        }
        out.features.push_back(std::move(r));
    }
    return out;
}

}  // namespace ransomrisk::cti
