#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ransomrisk/activity.hpp"
#include "ransomrisk/core/types.hpp"
#include "ransomrisk/forest/forest.hpp"
#include "ransomrisk/forest/metrics.hpp"
#include "ransomrisk/forest/risk.hpp"
#include "ransomrisk/ingest.hpp"
#include "ransomrisk/synth.hpp"

namespace ransomrisk::app {

/// Adversary profiles from a STIX store bundle or a plain JSON array of profiles.
std::vector<AdversaryProfile> load_adversaries(const std::string& path);

/// Lenient option parsing for config files and flags: absent keys keep
/// their defaults, unknown keys throw UnknownOption.
synth::SynthesisConfig synthesis_config_from_json(const nlohmann::json& j, std::uint64_t seed);
forest::ForestConfig forest_config_from_json(const nlohmann::json& j, std::uint64_t seed);

struct PredictionRequest {
    VictimProfile company;
    std::string group;
    YearMonth as_of;
};

inline constexpr std::size_t kTopFeatures = 6;

/// Scores company ⊕ group profile ⊕ the group's EWMA at `as_of` (0 when the
/// group has no recorded activity). top_features lists the columns active in
/// this row, ranked by global importance. Throws UnknownGroup.
forest::RiskAssessment predict(const forest::Forest& model, const ingest::AdversaryIndex& adversaries,
                               const activity::EwmaTable& ewma, const PredictionRequest& request);

/// Level desc, confidence desc, group name asc.
void order_assessments(std::vector<forest::RiskAssessment>& assessments);

inline constexpr int kReportSchemaVersion = 1;

/// Versioned JSON report; assessments are ordered before rendering.
nlohmann::json report_json(std::vector<forest::RiskAssessment> assessments, const nlohmann::json& provenance);
/// Markdown rendering of a JSON report (as produced by report_json).
std::string report_markdown(const nlohmann::json& report);

/// Hash of a configuration document's canonical dump.
std::string config_hash(const nlohmann::json& config);

struct PipelineSummary {
    std::vector<std::string> artifacts;  // paths written, in stage order
    forest::Metrics metrics;
    nlohmann::json provenance;
};

/// extract (fixture replay) → ingest → ewma → synthesize → train → evaluate
/// → report. Relative paths resolve against `base_dir`; `output_dir`
/// overrides the config's when non-empty. Stage failures rethrow with the
/// stage name and the offending path in the message.
PipelineSummary run_pipeline(const nlohmann::json& config, const std::string& base_dir,
                             const std::string& output_dir = "");

}  // namespace ransomrisk::app
