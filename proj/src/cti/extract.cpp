#include "ransomrisk/cti/extract.hpp"

#include <algorithm>
#include <filesystem>

#include "ransomrisk/core/error.hpp"
#include "ransomrisk/core/json_io.hpp"
#include "ransomrisk/cti/prompt.hpp"

namespace ransomrisk::cti {

std::vector<Report> load_reports(const std::string& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw Error("FileNotFound", "report directory " + dir, ErrorKind::usage);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<Report> out;
    for (const auto& f : files) out.push_back({f.stem().string(), read_file(f.string())});
    return out;
}

std::vector<ReportOutcome> run_extraction(const std::vector<Report>& reports, const std::vector<FeatureSpec>& specs,
                                          const StandardRegistry& registry, ChatClient& client, StixStore& store,
                                          const ExtractionOptions& options) {
    check_bundle(specs, registry);
    std::vector<ReportOutcome> outcomes;
    for (const auto& report : reports) {
        ReportOutcome out;
        out.report = report.name;
        try {
            auto prompt = compile_prompt(specs, report.text);
            out.prompt_sha256 = sha256_hex(prompt);
            auto parts = query(client, prompt, options.part_cap);
            if (!options.record_dir.empty()) write_fixture(options.record_dir, prompt, parts);
            out.features = validate_features(serialize_responses(parts), specs, registry);

            // Reports about a known actor (by name or alias) merge into it.
            auto extracted = out.features.first(feature_keys::adversary_name);
            std::string name = extracted.empty() ? report.name : extracted;
            if (auto canonical = store.resolve_actor(name)) {
                name = *canonical;
            } else {
                for (const auto& alias : out.features.values(feature_keys::aliases)) {
                    if (auto c = store.resolve_actor(alias)) {
                        name = *c;
                        break;
                    }
                }
            }
            out.adversary = name;
            out.object_ids = store.store_objects(synthesize_stix(out.features, name, options.seed));
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::usage && e.code() != "ContextWindowExceeded") throw;
            out.error = e.what();
        }
        outcomes.push_back(std::move(out));
    }
    return outcomes;
}

nlohmann::json rejects_to_json(const std::vector<ReportOutcome>& outcomes) {
    auto out = nlohmann::json::array();
    for (const auto& o : outcomes) {
        auto entry = nlohmann::json{{"report", o.report}};
        if (!o.error.empty()) entry["error"] = o.error;
        auto rejected = nlohmann::json::object();
        auto missing = nlohmann::json::array();
        for (const auto& f : o.features.features) {
            if (f.missing) missing.push_back(f.name);
            if (f.rejections.empty()) continue;
            auto list = nlohmann::json::array();
            for (const auto& [raw, reason] : f.rejections) list.push_back({{"value", raw}, {"reason", reason}});
            rejected[f.name] = list;
        }
        if (rejected.empty() && missing.empty() && o.error.empty()) continue;
        entry["rejections"] = rejected;
        entry["missing"] = missing;
        out.push_back(entry);
    }
    return out;
}

}  // namespace ransomrisk::cti
