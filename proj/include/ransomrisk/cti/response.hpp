#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ransomrisk/cti/feature_spec.hpp"
#include "ransomrisk/cti/llm_client.hpp"

namespace ransomrisk::cti {

/// Joins parts in index order and strips a surrounding ``` fence. Throws
/// NonContiguousParts when indices are not exactly 0..n-1 and
/// UnparseableUnifiedResponse when the result is not one JSON document.
nlohmann::json serialize_responses(const std::vector<RawResponse>& parts);

struct FeatureResult {
    std::string name;
    std::string standard;
    std::vector<std::string> accepted;                         // normalized, deduplicated, in reply order
    std::string rationale;                                     // verbatim
    std::vector<std::pair<std::string, std::string>> rejections;  // (raw value, reason)
    bool missing = false;                                      // feature absent from the reply
};

struct ValidatedFeatures {
    std::vector<FeatureResult> features;  // spec order

    const FeatureResult* find(std::string_view name) const;
    /// First accepted value of a feature, or empty.
    std::string first(std::string_view name) const;
    std::vector<std::string> values(std::string_view name) const;
    nlohmann::json to_json() const;
};

/// Runs each requested feature's values through its standard. Invalid
/// values become rejections, absent features are flagged missing; nothing
/// is invented.
ValidatedFeatures validate_features(const nlohmann::json& unified, const std::vector<FeatureSpec>& specs,
                                    const StandardRegistry& registry);

}  // namespace ransomrisk::cti
