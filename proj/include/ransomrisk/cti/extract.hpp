#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ransomrisk/cti/feature_spec.hpp"
#include "ransomrisk/cti/llm_client.hpp"
#include "ransomrisk/cti/response.hpp"
#include "ransomrisk/cti/stix.hpp"

namespace ransomrisk::cti {

struct Report {
    std::string name;  // file stem; fallback adversary name
    std::string text;
};

/// Every regular file in `dir`, sorted by name.
std::vector<Report> load_reports(const std::string& dir);

struct ReportOutcome {
    std::string report;
    std::string prompt_sha256;
    std::string adversary;
    ValidatedFeatures features;
    std::vector<std::string> object_ids;
    std::string error;  // empty on success
};

struct ExtractionOptions {
    std::uint64_t seed = 0;
    std::size_t part_cap = kDefaultPartCap;
    std::string record_dir;  // when set, finished exchanges are written as fixtures
};

/// compile → query → serialize → validate → synthesize → store, report by
/// report. Failures are captured per report; other reports continue.
std::vector<ReportOutcome> run_extraction(const std::vector<Report>& reports, const std::vector<FeatureSpec>& specs,
                                          const StandardRegistry& registry, ChatClient& client, StixStore& store,
                                          const ExtractionOptions& options = {});

/// Rejected values and failed reports, for analyst review.
nlohmann::json rejects_to_json(const std::vector<ReportOutcome>& outcomes);

}  // namespace ransomrisk::cti
